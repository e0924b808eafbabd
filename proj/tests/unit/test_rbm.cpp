#include <doctest.h>

#include <cmath>

#include "mvrbm/oracle.hpp"
#include "mvrbm/rbm.hpp"
#include "support/synthetic.hpp"

using namespace mvrbm;
using testsupport::random_params;

namespace {

// Exhaustive log-likelihood for a tiny classic RBM, independent of the
// factored-model oracle.
double rbm_exact_loglik(const std::vector<Vector>& data, const RbmParams& p) {
    const Index nv = p.visible_dim(), nh = p.hidden_dim();
    const std::size_t xs = std::size_t{1} << nv, ys = std::size_t{1} << nh;
    const auto decode = [](std::size_t idx, Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = (idx >> i) & 1u ? 1.0 : 0.0;
        return v;
    };
    double z = 0.0;
    for (std::size_t x = 0; x < xs; ++x)
        for (std::size_t y = 0; y < ys; ++y)
            z += std::exp(-rbm_energy(decode(x, nv), decode(y, nh), p));
    double s = 0.0;
    for (const Vector& x : data) {
        double ux = 0.0;
        for (std::size_t y = 0; y < ys; ++y) ux += std::exp(-rbm_energy(x, decode(y, nh), p));
        s += std::log(ux);
    }
    return s / static_cast<double>(data.size()) - std::log(z);
}

}  // namespace

TEST_CASE("rbm_energy: hand cases") {
    RbmParams p{Matrix::Zero(1, 1), Vector::Zero(1), Vector::Zero(1)};
    CHECK(rbm_energy(Vector::Zero(1), Vector::Zero(1), p) == 0.0);
    p.W(0, 0) = 6.0;
    p.b(0) = 1.0;
    p.c(0) = 5.0;
    CHECK(rbm_energy(Vector::Ones(1), Vector::Ones(1), p) == doctest::Approx(-12.0));
}

TEST_CASE("rbm_energy: kron-instantiated model matches the factored energy everywhere") {
    Rng rng(3);
    const MvrbmParams p = random_params(2, 3, 2, 2, rng);
    const RbmParams flat = kron_instantiate(p);
    const ExactModel m = enumerate_model(p);
    double worst = 0.0;
    for (std::size_t x = 0; x < m.visible_states(); ++x)
        for (std::size_t y = 0; y < m.hidden_states(); ++y) {
            const Matrix X = m.decode_visible(x);
            const Matrix Y = m.decode_hidden(y);
            const double lhs = rbm_energy(vectorize(X), vectorize(Y), flat);
            worst = std::max(worst, std::abs(lhs - energy(X, Y, p)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("rbm conditionals: zero params and scalar case") {
    RbmParams p{Matrix::Zero(3, 2), Vector::Zero(3), Vector::Zero(2)};
    CHECK((rbm_hidden_activation(Vector::Ones(3), p).array() == 0.5).all());
    CHECK((rbm_visible_activation(Vector::Ones(2), p).array() == 0.5).all());

    RbmParams q{Matrix::Constant(1, 1, 6.0), Vector::Ones(1), Vector::Constant(1, 5.0)};
    CHECK(rbm_hidden_activation(Vector::Ones(1), q)(0) == doctest::Approx(sigmoid(11.0)));
}

TEST_CASE("rbm conditionals: kron-instantiated model reproduces matrix activations") {
    Rng rng(7);
    const MvrbmParams p = random_params(3, 2, 2, 2, rng);
    const RbmParams flat = kron_instantiate(p);
    const Matrix half_y = Matrix::Constant(2, 2, 0.5);
    const Matrix half_x = Matrix::Constant(3, 2, 0.5);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix y = sample_bernoulli(half_y, rng);
        const Vector vis = rbm_visible_activation(vectorize(y), flat);
        CHECK((vis - vectorize(visible_activation(y, p))).cwiseAbs().maxCoeff() < 1e-12);
        const Matrix x = sample_bernoulli(half_x, rng);
        const Vector hid = rbm_hidden_activation(vectorize(x), flat);
        CHECK((hid - vectorize(hidden_activation(x, p))).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kron equivalence: identical joint distributions at oracle scale") {
    Rng rng(11);
    const MvrbmParams p = random_params(2, 2, 2, 2, rng, 0.7);
    const ExactModel m = enumerate_model(p);
    const RbmParams flat = kron_instantiate(p);

    // Equal energies on every state force equal Boltzmann probabilities.
    double z = 0.0;
    std::vector<double> flat_joint;
    for (std::size_t x = 0; x < m.visible_states(); ++x)
        for (std::size_t y = 0; y < m.hidden_states(); ++y) {
            const double e = rbm_energy(vectorize(m.decode_visible(x)),
                                        vectorize(m.decode_hidden(y)), flat);
            flat_joint.push_back(std::exp(-e));
            z += flat_joint.back();
        }
    std::size_t s = 0;
    for (std::size_t x = 0; x < m.visible_states(); ++x)
        for (std::size_t y = 0; y < m.hidden_states(); ++y, ++s)
            CHECK(flat_joint[s] / z == doctest::Approx(m.joint_prob(x, y)).epsilon(1e-10));
}

TEST_CASE("param dominance: the dense model never has fewer parameters") {
    for (Index i = 2; i <= 4; ++i)
        for (Index j = 2; j <= 4; ++j)
            for (Index k = 2; k <= 4; ++k)
                for (Index l = 2; l <= 4; ++l) {
                    const auto [factored, classic] = param_count({i, j, k, l});
                    CHECK(classic >= factored);
                }
}

TEST_CASE("rbm_train: deterministic and moment-matching on constant data") {
    const std::vector<Vector> data(30, Vector::Ones(4));
    TrainConfig cfg;
    cfg.epochs = 1200;
    cfg.batch_size = 30;
    cfg.seed = 5;
    auto [p1, r1] = rbm_train(data, 4, 1, cfg);
    auto [p2, r2] = rbm_train(data, 4, 1, cfg);
    CHECK(p1.W == p2.W);
    CHECK(p1.b == p2.b);
    CHECK(p1.c == p2.c);
    for (Index i = 0; i < 4; ++i) CHECK(sigmoid(p1.b(i)) > 0.95);
}

TEST_CASE("rbm_train: exact log-likelihood improves on vectorized oracle data") {
    Rng rng(13);
    const MvrbmParams truth = random_params(2, 2, 2, 2, rng, 0.8);
    const ExactModel oracle = enumerate_model(truth);
    std::vector<Vector> data;
    Rng sampler(14);
    for (int n = 0; n < 400; ++n) data.push_back(vectorize(oracle.sample(sampler).first));

    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.batch_size = 50;
    cfg.seed = 15;
    cfg.weight_decay = 0.001;

    Rng init_rng(cfg.seed);
    RbmParams initial{Matrix(4, 4), Vector::Zero(4), Vector::Zero(4)};
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) initial.W(i, j) = init_rng.normal(0.0, 0.1);

    auto [trained, reports] = rbm_train(data, 4, 4, cfg);
    CHECK(rbm_exact_loglik(data, trained) > rbm_exact_loglik(data, initial));
}
