#include <doctest.h>

#include "mvrbm/model.hpp"
#include "support/synthetic.hpp"

using namespace mvrbm;
using testsupport::random_params;

namespace {

MvrbmParams scalar_params(double u, double v, double b, double c) {
    MvrbmParams p = MvrbmParams::zeros({1, 1, 1, 1});
    p.U(0, 0) = u;
    p.V(0, 0) = v;
    p.B(0, 0) = b;
    p.C(0, 0) = c;
    return p;
}

Matrix random_binary(Index rows, Index cols, Rng& rng) {
    return sample_bernoulli(Matrix::Constant(rows, cols, 0.5), rng);
}

}  // namespace

TEST_CASE("energy: zero states give zero energy") {
    Rng rng(11);
    const MvrbmParams p = random_params(3, 2, 2, 4, rng);
    CHECK(energy(Matrix::Zero(3, 2), Matrix::Zero(2, 4), p) == 0.0);
}

TEST_CASE("energy: scalar hand case") {
    const MvrbmParams p = scalar_params(2, 3, 1, 5);
    const Matrix one = Matrix::Ones(1, 1);
    CHECK(energy(one, one, p) == doctest::Approx(-12.0).epsilon(1e-15));
}

TEST_CASE("energy: shape mismatch names the operand") {
    const MvrbmParams p = scalar_params(1, 1, 0, 0);
    CHECK_THROWS_WITH_AS(energy(Matrix::Zero(2, 1), Matrix::Zero(1, 1), p),
                         doctest::Contains("X is 2x1"), DimensionError);
    CHECK_THROWS_WITH_AS(energy(Matrix::Zero(1, 1), Matrix::Zero(3, 1), p),
                         doctest::Contains("Y is 3x1"), DimensionError);
}

TEST_CASE("energy: invariant under (U,V) -> (sU, V/s)") {
    Rng rng(23);
    const MvrbmParams p = random_params(2, 3, 2, 2, rng);
    const Matrix x = random_binary(2, 3, rng);
    const Matrix y = random_binary(2, 2, rng);
    const double base = energy(x, y, p);

    for (double s : {2.0, 0.25, 1024.0}) {  // powers of two rescale exactly
        MvrbmParams q = p;
        q.U *= s;
        q.V /= s;
        CHECK(energy(x, y, q) == base);
    }
    for (double s : {3.7, -1.3}) {
        MvrbmParams q = p;
        q.U *= s;
        q.V /= s;
        CHECK(energy(x, y, q) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("full_tensor_energy: matches the factored energy on its tensor") {
    const MvrbmParams p1 = scalar_params(2, 3, 1, 5);
    const Matrix one = Matrix::Ones(1, 1);
    CHECK(full_tensor_energy(one, one, factored_tensor(p1), p1.B, p1.C) ==
          doctest::Approx(-12.0).epsilon(1e-15));

    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const Index I = 1 + static_cast<Index>(rng.index_below(3));
        const Index J = 1 + static_cast<Index>(rng.index_below(3));
        const Index K = 1 + static_cast<Index>(rng.index_below(3));
        const Index L = 1 + static_cast<Index>(rng.index_below(3));
        const MvrbmParams p = random_params(I, J, K, L, rng);
        const auto w4 = factored_tensor(p);
        for (int rep = 0; rep < 10; ++rep) {
            const Matrix x = random_binary(I, J, rng);
            const Matrix y = random_binary(K, L, rng);
            CHECK(full_tensor_energy(x, y, w4, p.B, p.C) ==
                  doctest::Approx(energy(x, y, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("full_tensor_energy: zero tensor and biases give zero everywhere") {
    Rng rng(7);
    const std::vector<double> w4(2 * 2 * 2 * 2, 0.0);
    for (int rep = 0; rep < 8; ++rep) {
        const Matrix x = random_binary(2, 2, rng);
        const Matrix y = random_binary(2, 2, rng);
        CHECK(full_tensor_energy(x, y, w4, Matrix::Zero(2, 2), Matrix::Zero(2, 2)) == 0.0);
    }
}

TEST_CASE("full_tensor_energy: generic tensors are not factorable") {
    // Entries of a factored tensor satisfy w[ijkl]*w[i'j'k'l'] = w[ij'kl']*w[i'jk'l];
    // a generic tensor violates it, so no (U, V) pair can reproduce it.
    auto at = [](const std::vector<double>& w, int i, int j, int k, int l) {
        return w[static_cast<std::size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
    };
    Rng rng(13);
    const MvrbmParams p = random_params(2, 2, 2, 2, rng);
    const auto factored = factored_tensor(p);
    CHECK(at(factored, 0, 0, 0, 0) * at(factored, 1, 1, 1, 1) ==
          doctest::Approx(at(factored, 0, 1, 0, 1) * at(factored, 1, 0, 1, 0)).epsilon(1e-12));

    std::vector<double> generic(16);
    for (auto& w : generic) w = rng.normal();
    const double lhs = at(generic, 0, 0, 0, 0) * at(generic, 1, 1, 1, 1);
    const double rhs = at(generic, 0, 1, 0, 1) * at(generic, 1, 0, 1, 0);
    CHECK(std::abs(lhs - rhs) > 1e-6);
}

TEST_CASE("activations: zero parameters give one half everywhere") {
    const MvrbmParams p = MvrbmParams::zeros({2, 3, 2, 2});
    Rng rng(3);
    const Matrix y = random_binary(2, 2, rng);
    const Matrix x = random_binary(2, 3, rng);
    CHECK((visible_activation(y, p).array() == 0.5).all());
    CHECK((hidden_activation(x, p).array() == 0.5).all());
}

TEST_CASE("activations: scalar hand cases hit sigma(0)") {
    const MvrbmParams pv = scalar_params(2, 3, -6, 0);
    CHECK(visible_activation(Matrix::Ones(1, 1), pv)(0, 0) == doctest::Approx(0.5));
    const MvrbmParams ph = scalar_params(2, 3, 0, -6);
    CHECK(hidden_activation(Matrix::Ones(1, 1), ph)(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("sigmoid: strictly inside the open unit interval") {
    for (double x : {-1e6, -800.0, -36.0, 0.0, 36.0, 800.0, 1e6}) {
        const double s = sigmoid(x);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
    CHECK(sigmoid(0.0) == 0.5);
    Rng rng(17);
    const MvrbmParams p = random_params(2, 2, 2, 2, rng, 500.0);  // saturating scale
    const Matrix act = hidden_activation(Matrix::Ones(2, 2), p);
    CHECK((act.array() > 0.0).all());
    CHECK((act.array() < 1.0).all());
}

TEST_CASE("sample_bernoulli: degenerate probabilities are exact") {
    Rng rng(29);
    CHECK((sample_bernoulli(Matrix::Zero(3, 4), rng).array() == 0.0).all());
    CHECK((sample_bernoulli(Matrix::Ones(3, 4), rng).array() == 1.0).all());
}

TEST_CASE("sample_bernoulli: consumes exactly rows*cols draws in row-major order") {
    Rng a(101), b(101);
    sample_bernoulli(Matrix::Constant(3, 5, 0.5), a);
    for (int i = 0; i < 15; ++i) b.uniform();
    CHECK(a.uniform() == b.uniform());
}

TEST_CASE("sample_bernoulli: empirical mean concentrates") {
    Rng rng(42);
    const Matrix act = Matrix::Constant(4, 4, 0.5);
    Matrix sum = Matrix::Zero(4, 4);
    const int n = 10000;
    for (int t = 0; t < n; ++t) sum += sample_bernoulli(act, rng);
    const Matrix mean = sum / n;
    CHECK(mean.minCoeff() >= 0.47);
    CHECK(mean.maxCoeff() <= 0.53);
}

TEST_CASE("gibbs_step: zero parameters flip fair coins") {
    const MvrbmParams p = MvrbmParams::zeros({2, 2, 2, 2});
    Rng rng(55);
    Matrix x = Matrix::Zero(2, 2);
    double y_sum = 0.0, x_sum = 0.0;
    const int n = 4000;
    for (int t = 0; t < n; ++t) {
        auto [y, x_next] = gibbs_step(x, p, rng);
        y_sum += y.sum();
        x_sum += x_next.sum();
    }
    CHECK(y_sum / (4.0 * n) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(x_sum / (4.0 * n) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("gibbs_step: deterministic under a fixed seed") {
    Rng rng(91);
    const MvrbmParams p = random_params(2, 3, 2, 2, rng);
    const Matrix x = random_binary(2, 3, rng);
    Rng r1(1234), r2(1234);
    auto [y1, x1] = gibbs_step(x, p, r1);
    auto [y2, x2] = gibbs_step(x, p, r2);
    CHECK(y1 == y2);
    CHECK(x1 == x2);
}

TEST_CASE("kron_weight: scalar and identity cases") {
    CHECK(kron_weight(scalar_params(2, 3, 0, 0))(0, 0) == doctest::Approx(6.0));

    MvrbmParams p = MvrbmParams::zeros({2, 3, 2, 3});
    p.U = Matrix::Identity(2, 2);
    p.V = Matrix::Identity(3, 3);
    const Matrix w = kron_weight(p);
    CHECK(w.isApprox(Matrix::Identity(6, 6)));
    Rng rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix x = random_binary(2, 3, rng);
        const Matrix y = random_binary(2, 3, rng);
        const Vector vx = Eigen::Map<const Vector>(x.data(), x.size());
        const Vector vy = Eigen::Map<const Vector>(y.data(), y.size());
        CHECK(vx.dot(w * vy) == doctest::Approx((y * x.transpose()).trace()).epsilon(1e-12));
    }
}

TEST_CASE("kron_weight: bilinear form equals the trace interaction") {
    Rng rng(123);
    const MvrbmParams p = random_params(2, 3, 2, 2, rng);
    const Matrix w = kron_weight(p);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix x = random_binary(2, 3, rng);
        const Matrix y = random_binary(2, 2, rng);
        const Vector vx = Eigen::Map<const Vector>(x.data(), x.size());
        const Vector vy = Eigen::Map<const Vector>(y.data(), y.size());
        const double lhs = vx.dot(w * vy);
        const double rhs = (p.U.transpose() * y * p.V * x.transpose()).trace();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("params: shape consistency is enforced") {
    MvrbmParams p = MvrbmParams::zeros({2, 2, 2, 2});
    p.U = Matrix::Zero(3, 2);
    CHECK_THROWS_AS(p.validate(), DimensionError);
    p = MvrbmParams::zeros({2, 2, 2, 2});
    p.B(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), DataError);
}

TEST_CASE("init_params: gaussian factors, zero biases, seed-stable") {
    Rng a(999), b(999);
    const MvrbmParams p = init_params({4, 3, 2, 5}, a);
    const MvrbmParams q = init_params({4, 3, 2, 5}, b);
    CHECK(p.U == q.U);
    CHECK(p.V == q.V);
    CHECK(p.B.isZero(0.0));
    CHECK(p.C.isZero(0.0));
    CHECK(p.U.cwiseAbs().maxCoeff() < 1.0);  // 0.1 stddev stays small
}
