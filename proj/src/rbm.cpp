#include "mvrbm/rbm.hpp"

namespace mvrbm {

void RbmParams::validate() const {
    if (W.rows() != b.size())
        throw DimensionError("rbm params: W has " + std::to_string(W.rows()) + " rows but b has " +
                             std::to_string(b.size()) + " entries");
    if (W.cols() != c.size())
        throw DimensionError("rbm params: W has " + std::to_string(W.cols()) + " cols but c has " +
                             std::to_string(c.size()) + " entries");
    if (!W.allFinite() || !b.allFinite() || !c.allFinite())
        throw DataError("rbm params: non-finite entries");
}

namespace {

void check_visible(const Vector& x, const RbmParams& p, const char* name) {
    if (x.size() != p.visible_dim())
        throw DimensionError(std::string(name) + " has " + std::to_string(x.size()) +
                             " entries, expected " + std::to_string(p.visible_dim()));
}

void check_hidden(const Vector& y, const RbmParams& p, const char* name) {
    if (y.size() != p.hidden_dim())
        throw DimensionError(std::string(name) + " has " + std::to_string(y.size()) +
                             " entries, expected " + std::to_string(p.hidden_dim()));
}

double rbm_cd_sample(const RbmParams& p, const Vector& x0, int cd_steps, bool mean_field_negative,
                     Rng& rng, RbmGradient& g) {
    const Vector h0 = (p.W.transpose() * x0 + p.c).unaryExpr([](double v) { return sigmoid(v); });
    Vector xk = x0;
    Vector hk = h0;
    for (int k = 0; k < cd_steps; ++k) {
        const Vector y = sample_bernoulli(hk, rng);
        const Vector vis = (p.W * y + p.b).unaryExpr([](double v) { return sigmoid(v); });
        xk = mean_field_negative ? vis : sample_bernoulli(vis, rng);
        hk = (p.W.transpose() * xk + p.c).unaryExpr([](double v) { return sigmoid(v); });
    }
    g.dW.noalias() += x0 * h0.transpose();
    g.dW.noalias() -= xk * hk.transpose();
    g.db += x0 - xk;
    g.dc += h0 - hk;
    const Vector recon = (p.W * h0 + p.b).unaryExpr([](double v) { return sigmoid(v); });
    return (x0 - recon).cwiseAbs().sum() / static_cast<double>(x0.size());
}

struct RbmFamily {
    using Params = RbmParams;
    using Grad = RbmGradient;

    const std::vector<Vector>& data;
    Index visible_dim;
    Index hidden_dim;

    std::size_t size() const { return data.size(); }

    Params init(Rng& rng) const {
        RbmParams p{Matrix(visible_dim, hidden_dim), Vector::Zero(visible_dim),
                    Vector::Zero(hidden_dim)};
        for (Index i = 0; i < p.W.rows(); ++i)
            for (Index j = 0; j < p.W.cols(); ++j) p.W(i, j) = rng.normal(0.0, 0.1);
        return p;
    }

    Grad zero_grad() const { return RbmGradient::zeros(visible_dim, hidden_dim); }

    double cd_batch(const Params& p, const std::size_t* idx, std::size_t n, const TrainConfig& cfg,
                    Rng& rng, Grad& out) const {
        double mae = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mae += rbm_cd_sample(p, data[idx[i]], cfg.cd_steps, cfg.mean_field_negative, rng, out);
        out.scale(1.0 / static_cast<double>(n));
        return mae;
    }

    void update(Params& p, Grad& velocity, const Grad& incr, const TrainConfig& cfg) const {
        detail::momentum_step(p.W, velocity.dW, incr.dW, cfg.learning_rate, cfg.momentum,
                              cfg.weight_decay);
        detail::momentum_step(p.b, velocity.db, incr.db, cfg.learning_rate, cfg.momentum, 0.0);
        detail::momentum_step(p.c, velocity.dc, incr.dc, cfg.learning_rate, cfg.momentum, 0.0);
    }

    bool params_ok(const Params& p) const {
        if (!p.W.allFinite() || !p.b.allFinite() || !p.c.allFinite()) return false;
        const double m = std::max(
            {p.W.cwiseAbs().maxCoeff(), p.b.cwiseAbs().maxCoeff(), p.c.cwiseAbs().maxCoeff()});
        return m <= detail::kDivergenceCap;
    }

    std::array<double, 4> grad_norms(const Grad& g) const {
        return {g.dW.norm(), 0.0, g.db.norm(), g.dc.norm()};
    }
};

}  // namespace

double rbm_energy(const Vector& x, const Vector& y, const RbmParams& params) {
    check_visible(x, params, "x");
    check_hidden(y, params, "y");
    return -x.dot(params.W * y) - params.b.dot(x) - params.c.dot(y);
}

Vector rbm_hidden_activation(const Vector& x, const RbmParams& params) {
    check_visible(x, params, "x");
    return (params.W.transpose() * x + params.c).unaryExpr([](double v) { return sigmoid(v); });
}

Vector rbm_visible_activation(const Vector& y, const RbmParams& params) {
    check_hidden(y, params, "y");
    return (params.W * y + params.b).unaryExpr([](double v) { return sigmoid(v); });
}

Vector sample_bernoulli(const Vector& activation, Rng& rng) {
    Vector out(activation.size());
    for (Index i = 0; i < activation.size(); ++i)
        out(i) = rng.uniform() < activation(i) ? 1.0 : 0.0;
    return out;
}

RbmParams kron_instantiate(const MvrbmParams& params) {
    return {kron_weight(params), vectorize(params.B), vectorize(params.C)};
}

Vector vectorize(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw DimensionError("unvectorize: " + std::to_string(v.size()) + " entries cannot fill " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

RbmGradient rbm_cd_gradient(const std::vector<Vector>& batch, const RbmParams& params,
                            int cd_steps, Rng& rng, bool mean_field_negative) {
    params.validate();
    if (batch.empty()) throw UsageError("rbm_cd_gradient: empty batch");
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (batch[i].size() != params.visible_dim())
            throw DimensionError("sample " + std::to_string(i) + " has " +
                                 std::to_string(batch[i].size()) + " entries, expected " +
                                 std::to_string(params.visible_dim()));
    RbmGradient g = RbmGradient::zeros(params.visible_dim(), params.hidden_dim());
    for (const Vector& x : batch) rbm_cd_sample(params, x, cd_steps, mean_field_negative, rng, g);
    g.scale(1.0 / static_cast<double>(batch.size()));
    return g;
}

std::pair<RbmParams, std::vector<EpochReport>> rbm_train(const std::vector<Vector>& data,
                                                         Index visible_dim, Index hidden_dim,
                                                         const TrainConfig& cfg,
                                                         const EpochObserver& observer) {
    if (visible_dim < 1 || hidden_dim < 1) throw UsageError("rbm_train: dimensions must be >= 1");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].size() != visible_dim)
            throw DimensionError("sample " + std::to_string(i) + " has " +
                                 std::to_string(data[i].size()) + " entries, expected " +
                                 std::to_string(visible_dim));
        if ((data[i].array() < 0.0).any() || (data[i].array() > 1.0).any())
            throw DataError("sample " + std::to_string(i) + " has entries outside [0, 1]");
    }
    RbmFamily family{data, visible_dim, hidden_dim};
    return detail::run_cd_training(family, cfg, observer);
}

}  // namespace mvrbm
