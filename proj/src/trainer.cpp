#include "mvrbm/trainer.hpp"

#include <cstdio>
#include <fstream>

namespace mvrbm {

namespace {

// Runs one CD chain for a single sample and accumulates its statistics.
// Returns the per-pixel MAE between the sample and its mean-field
// reconstruction (from the positive-phase hidden probabilities).
double cd_sample(const MvrbmParams& p, const Matrix& x0, int cd_steps, bool mean_field_negative,
                 Rng& rng, GradientIncrement& g) {
    const Matrix h0 = sigmoid(hidden_preactivation(x0, p));
    Matrix xk = x0;
    Matrix hk = h0;
    for (int k = 0; k < cd_steps; ++k) {
        const Matrix y = sample_bernoulli(hk, rng);
        const Matrix vis = sigmoid(visible_preactivation(y, p));
        xk = mean_field_negative ? vis : sample_bernoulli(vis, rng);
        hk = sigmoid(hidden_preactivation(xk, p));
    }
    detail::accumulate_primary_stats(p, x0, h0, xk, hk, g);
    const Matrix recon = detail::mean_field_reconstruction(h0, p);
    return (x0 - recon).cwiseAbs().sum() / static_cast<double>(x0.size());
}

void check_sample(const Matrix& x, const MvrbmParams& p, std::size_t index) {
    if (x.rows() != p.visible_rows() || x.cols() != p.visible_cols())
        throw DimensionError("sample " + std::to_string(index) + " is " + shape_str(x) +
                             ", expected " + std::to_string(p.visible_rows()) + "x" +
                             std::to_string(p.visible_cols()));
}

struct MvrbmFamily {
    using Params = MvrbmParams;
    using Grad = GradientIncrement;

    const std::vector<Matrix>& data;
    LayerShape shape;

    std::size_t size() const { return data.size(); }

    Params init(Rng& rng) const { return init_params(shape, rng); }

    Grad zero_grad() const { return GradientIncrement::zeros_like(MvrbmParams::zeros(shape)); }

    double cd_batch(const Params& p, const std::size_t* idx, std::size_t n, const TrainConfig& cfg,
                    Rng& rng, Grad& out) const {
        double mae = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mae += cd_sample(p, data[idx[i]], cfg.cd_steps, cfg.mean_field_negative, rng, out);
        out.scale(1.0 / static_cast<double>(n));
        return mae;
    }

    void update(Params& p, Grad& velocity, const Grad& incr, const TrainConfig& cfg) const {
        detail::momentum_update_mvrbm(p, velocity, incr, cfg);
    }

    bool params_ok(const Params& p) const { return detail::mvrbm_params_ok(p); }

    std::array<double, 4> grad_norms(const Grad& g) const {
        return {g.dU.norm(), g.dV.norm(), g.dB.norm(), g.dC.norm()};
    }
};

}  // namespace

GradientIncrement cd_gradient(const std::vector<Matrix>& batch, const MvrbmParams& params,
                              int cd_steps, Rng& rng, bool mean_field_negative) {
    params.validate();
    if (batch.empty()) throw UsageError("cd_gradient: empty batch");
    if (cd_steps < 1) throw UsageError("cd_gradient: cd_steps must be >= 1");
    for (std::size_t i = 0; i < batch.size(); ++i) check_sample(batch[i], params, i);

    GradientIncrement g = GradientIncrement::zeros_like(params);
    for (const Matrix& x : batch) cd_sample(params, x, cd_steps, mean_field_negative, rng, g);
    g.scale(1.0 / static_cast<double>(batch.size()));
    return g;
}

void apply_update(MvrbmParams& params, const GradientIncrement& incr, GradientIncrement& velocity,
                  const TrainConfig& cfg) {
    cfg.validate();
    detail::momentum_update_mvrbm(params, velocity, incr, cfg);
    if (!detail::mvrbm_params_ok(params))
        throw DivergenceError("apply_update produced divergent parameters");
}

std::pair<MvrbmParams, std::vector<EpochReport>> train(const std::vector<Matrix>& data,
                                                       const LayerShape& shape,
                                                       const TrainConfig& cfg,
                                                       const EpochObserver& observer) {
    shape.validate();
    MvrbmParams probe = MvrbmParams::zeros(shape);
    for (std::size_t i = 0; i < data.size(); ++i) {
        check_sample(data[i], probe, i);
        if (!in_unit_interval(data[i]))
            throw DataError("sample " + std::to_string(i) + " has entries outside [0, 1]");
    }
    MvrbmFamily family{data, shape};
    return detail::run_cd_training(family, cfg, observer);
}

std::pair<long, long> param_count(const LayerShape& s) {
    s.validate();
    const long i = s.visible_rows, j = s.visible_cols, k = s.hidden_rows, l = s.hidden_cols;
    const long factored = i * k + l * j + i * j + k * l;
    const long classic = i * j * k * l + i * j + k * l;
    return {factored, classic};
}

void write_telemetry_csv(const std::vector<EpochReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open telemetry file " + path);
    out << "epoch,recon_error,grad_norm_U,grad_norm_V,grad_norm_B,grad_norm_C,seconds\n";
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", r.epoch,
                      r.recon_error, r.grad_norm_u, r.grad_norm_v, r.grad_norm_b, r.grad_norm_c,
                      r.seconds);
        out << buf;
    }
}

}  // namespace mvrbm
