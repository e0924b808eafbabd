#include "mvrbm/multimodal.hpp"

namespace mvrbm {

void MultimodalParams::validate() const {
    base.validate();
    for (std::size_t e = 0; e < channels.size(); ++e) {
        const auto& ch = channels[e];
        const std::string tag = "channel " + std::to_string(e + 1);
        if (ch.Q.rows() != hidden_rows())
            throw DimensionError(tag + ": Q has " + std::to_string(ch.Q.rows()) +
                                 " rows, expected " + std::to_string(hidden_rows()));
        if (ch.R.rows() != hidden_cols())
            throw DimensionError(tag + ": R has " + std::to_string(ch.R.rows()) +
                                 " rows, expected " + std::to_string(hidden_cols()));
        if (ch.Q.cols() != ch.A.rows() || ch.R.cols() != ch.A.cols())
            throw DimensionError(tag + ": A is " + shape_str(ch.A) + " but factors give " +
                                 std::to_string(ch.Q.cols()) + "x" + std::to_string(ch.R.cols()));
        if (!ch.Q.allFinite() || !ch.R.allFinite() || !ch.A.allFinite())
            throw DataError(tag + ": non-finite entries");
    }
}

void MultimodalShape::validate() const {
    primary.validate();
    for (const auto& [h, w] : channels)
        if (h < 1 || w < 1) throw UsageError("channel dimensions must be >= 1");
}

MmGradient MmGradient::zeros_like(const MultimodalParams& p) {
    MmGradient g;
    g.primary = GradientIncrement::zeros_like(p.base);
    g.channels.reserve(p.channels.size());
    for (const auto& ch : p.channels)
        g.channels.push_back({Matrix::Zero(ch.Q.rows(), ch.Q.cols()),
                              Matrix::Zero(ch.R.rows(), ch.R.cols()),
                              Matrix::Zero(ch.A.rows(), ch.A.cols())});
    return g;
}

void MmGradient::scale(double s) {
    primary.scale(s);
    for (auto& ch : channels) {
        ch.dQ *= s;
        ch.dR *= s;
        ch.dA *= s;
    }
}

namespace {

void check_sample(const MultimodalSample& s, const MultimodalParams& p, std::size_t index) {
    const std::string tag = "sample " + std::to_string(index);
    require_shape(s.x, p.base.visible_rows(), p.base.visible_cols(), tag.c_str());
    if (s.channels.size() != p.channels.size())
        throw DimensionError(tag + " has " + std::to_string(s.channels.size()) +
                             " channels, expected " + std::to_string(p.channels.size()));
    for (std::size_t e = 0; e < s.channels.size(); ++e)
        require_shape(s.channels[e], p.channels[e].A.rows(), p.channels[e].A.cols(),
                      (tag + " channel " + std::to_string(e + 1)).c_str());
}

Matrix mm_hidden_pre(const Matrix& x, const std::vector<Matrix>& z, const MultimodalParams& p) {
    Matrix pre = hidden_preactivation(x, p.base);
    for (std::size_t e = 0; e < p.channels.size(); ++e)
        pre.noalias() += p.channels[e].Q * z[e] * p.channels[e].R.transpose();
    return pre;
}

Matrix channel_visible_pre(const Matrix& y, const ChannelParams& ch) {
    return ch.Q.transpose() * y * ch.R + ch.A;
}

// One CD chain for a single multimodal sample; mirrors the plain trainer's
// chain on the primary channel so the zero-channel case is bit-identical.
double mm_cd_sample(const MultimodalParams& p, const MultimodalSample& s, int cd_steps,
                    bool mean_field_negative, Rng& rng, MmGradient& g) {
    const std::size_t n_ch = p.channels.size();
    const Matrix h0 = sigmoid(mm_hidden_pre(s.x, s.channels, p));
    Matrix xk = s.x;
    std::vector<Matrix> zk = s.channels;
    Matrix hk = h0;
    for (int k = 0; k < cd_steps; ++k) {
        const Matrix y = sample_bernoulli(hk, rng);
        const Matrix vis = sigmoid(visible_preactivation(y, p.base));
        xk = mean_field_negative ? vis : sample_bernoulli(vis, rng);
        for (std::size_t e = 0; e < n_ch; ++e) {
            const Matrix zvis = sigmoid(channel_visible_pre(y, p.channels[e]));
            zk[e] = mean_field_negative ? zvis : sample_bernoulli(zvis, rng);
        }
        hk = sigmoid(mm_hidden_pre(xk, zk, p));
    }
    detail::accumulate_primary_stats(p.base, s.x, h0, xk, hk, g.primary);
    for (std::size_t e = 0; e < n_ch; ++e) {
        const auto& ch = p.channels[e];
        auto& gc = g.channels[e];
        gc.dQ.noalias() += h0 * ch.R * s.channels[e].transpose();
        gc.dQ.noalias() -= hk * ch.R * zk[e].transpose();
        gc.dR.noalias() += h0.transpose() * ch.Q * s.channels[e];
        gc.dR.noalias() -= hk.transpose() * ch.Q * zk[e];
        gc.dA += s.channels[e] - zk[e];
    }
    const Matrix recon = detail::mean_field_reconstruction(h0, p.base);
    return (s.x - recon).cwiseAbs().sum() / static_cast<double>(s.x.size());
}

struct MmFamily {
    using Params = MultimodalParams;
    using Grad = MmGradient;

    const std::vector<MultimodalSample>& data;
    MultimodalShape shape;

    std::size_t size() const { return data.size(); }

    Params init(Rng& rng) const { return mm_init_params(shape, rng); }

    Grad zero_grad() const {
        MultimodalParams zeros;
        zeros.base = MvrbmParams::zeros(shape.primary);
        for (const auto& [h, w] : shape.channels)
            zeros.channels.push_back({Matrix::Zero(shape.primary.hidden_rows, h),
                                      Matrix::Zero(shape.primary.hidden_cols, w),
                                      Matrix::Zero(h, w)});
        return MmGradient::zeros_like(zeros);
    }

    double cd_batch(const Params& p, const std::size_t* idx, std::size_t n, const TrainConfig& cfg,
                    Rng& rng, Grad& out) const {
        double mae = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mae += mm_cd_sample(p, data[idx[i]], cfg.cd_steps, cfg.mean_field_negative, rng, out);
        out.scale(1.0 / static_cast<double>(n));
        return mae;
    }

    void update(Params& p, Grad& velocity, const Grad& incr, const TrainConfig& cfg) const {
        detail::momentum_update_mvrbm(p.base, velocity.primary, incr.primary, cfg);
        for (std::size_t e = 0; e < p.channels.size(); ++e) {
            detail::momentum_step(p.channels[e].Q, velocity.channels[e].dQ, incr.channels[e].dQ,
                                  cfg.learning_rate, cfg.momentum, cfg.weight_decay);
            detail::momentum_step(p.channels[e].R, velocity.channels[e].dR, incr.channels[e].dR,
                                  cfg.learning_rate, cfg.momentum, cfg.weight_decay);
            detail::momentum_step(p.channels[e].A, velocity.channels[e].dA, incr.channels[e].dA,
                                  cfg.learning_rate, cfg.momentum, 0.0);
        }
    }

    bool params_ok(const Params& p) const {
        if (!detail::mvrbm_params_ok(p.base)) return false;
        for (const auto& ch : p.channels) {
            if (!ch.Q.allFinite() || !ch.R.allFinite() || !ch.A.allFinite()) return false;
            const double m = std::max(
                {ch.Q.cwiseAbs().maxCoeff(), ch.R.cwiseAbs().maxCoeff(), ch.A.cwiseAbs().maxCoeff()});
            if (m > detail::kDivergenceCap) return false;
        }
        return true;
    }

    std::array<double, 4> grad_norms(const Grad& g) const {
        return {g.primary.dU.norm(), g.primary.dV.norm(), g.primary.dB.norm(), g.primary.dC.norm()};
    }
};

}  // namespace

double mm_energy(const MultimodalSample& sample, const Matrix& Y, const MultimodalParams& params) {
    check_sample(sample, params, 0);
    require_shape(Y, params.hidden_rows(), params.hidden_cols(), "Y");
    double e = energy(sample.x, Y, params.base);
    for (std::size_t i = 0; i < params.channels.size(); ++i) {
        const auto& ch = params.channels[i];
        const Matrix& z = sample.channels[i];
        e -= (ch.Q * z * ch.R.transpose()).cwiseProduct(Y).sum();
        e -= z.cwiseProduct(ch.A).sum();
    }
    return e;
}

Matrix mm_hidden_activation(const MultimodalSample& sample, const MultimodalParams& params) {
    check_sample(sample, params, 0);
    return sigmoid(mm_hidden_pre(sample.x, sample.channels, params));
}

Matrix mm_visible_activation(const Matrix& Y, const MultimodalParams& params, std::size_t channel) {
    require_shape(Y, params.hidden_rows(), params.hidden_cols(), "Y");
    if (channel == 0) return sigmoid(visible_preactivation(Y, params.base));
    if (channel > params.channels.size())
        throw UsageError("channel " + std::to_string(channel) + " out of range (model has " +
                         std::to_string(params.channels.size()) + " extra channels)");
    return sigmoid(channel_visible_pre(Y, params.channels[channel - 1]));
}

MultimodalParams mm_init_params(const MultimodalShape& shape, Rng& rng) {
    shape.validate();
    MultimodalParams p;
    p.base = init_params(shape.primary, rng);
    for (const auto& [h, w] : shape.channels) {
        ChannelParams ch{Matrix(shape.primary.hidden_rows, h), Matrix(shape.primary.hidden_cols, w),
                         Matrix::Zero(h, w)};
        for (Index i = 0; i < ch.Q.rows(); ++i)
            for (Index j = 0; j < ch.Q.cols(); ++j) ch.Q(i, j) = rng.normal(0.0, 0.1);
        for (Index i = 0; i < ch.R.rows(); ++i)
            for (Index j = 0; j < ch.R.cols(); ++j) ch.R(i, j) = rng.normal(0.0, 0.1);
        p.channels.push_back(std::move(ch));
    }
    return p;
}

MmGradient mm_cd_gradient(const std::vector<MultimodalSample>& batch,
                          const MultimodalParams& params, int cd_steps, Rng& rng,
                          bool mean_field_negative) {
    params.validate();
    if (batch.empty()) throw UsageError("mm_cd_gradient: empty batch");
    if (cd_steps < 1) throw UsageError("mm_cd_gradient: cd_steps must be >= 1");
    for (std::size_t i = 0; i < batch.size(); ++i) check_sample(batch[i], params, i);
    MmGradient g = MmGradient::zeros_like(params);
    for (const auto& s : batch) mm_cd_sample(params, s, cd_steps, mean_field_negative, rng, g);
    g.scale(1.0 / static_cast<double>(batch.size()));
    return g;
}

std::pair<MultimodalParams, std::vector<EpochReport>> mm_train(
    const std::vector<MultimodalSample>& data, const MultimodalShape& shape,
    const TrainConfig& cfg, const EpochObserver& observer) {
    shape.validate();
    MultimodalParams probe;
    probe.base = MvrbmParams::zeros(shape.primary);
    for (const auto& [h, w] : shape.channels)
        probe.channels.push_back({Matrix::Zero(shape.primary.hidden_rows, h),
                                  Matrix::Zero(shape.primary.hidden_cols, w), Matrix::Zero(h, w)});
    for (std::size_t i = 0; i < data.size(); ++i) {
        check_sample(data[i], probe, i);
        if (!in_unit_interval(data[i].x))
            throw DataError("sample " + std::to_string(i) + " has entries outside [0, 1]");
        for (const auto& z : data[i].channels)
            if (!in_unit_interval(z))
                throw DataError("sample " + std::to_string(i) +
                                " has channel entries outside [0, 1]");
    }
    MmFamily family{data, shape};
    return detail::run_cd_training(family, cfg, observer);
}

Matrix sr_infer(const std::vector<Matrix>& features, const Matrix& x0,
                const MultimodalParams& params, int cycles) {
    if (cycles < 1) throw UsageError("sr_infer: cycles must be >= 1");
    MultimodalSample s{x0, features};
    check_sample(s, params, 0);
    Matrix x = x0;
    for (int c = 0; c < cycles; ++c) {
        const Matrix y = sigmoid(mm_hidden_pre(x, features, params));
        x = sigmoid(visible_preactivation(y, params.base));
    }
    return x;
}

}  // namespace mvrbm
