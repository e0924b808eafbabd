#ifndef MVRBM_TRAINER_HPP
#define MVRBM_TRAINER_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "mvrbm/model.hpp"
#include "mvrbm/rng.hpp"
#include "mvrbm/types.hpp"

namespace mvrbm {

struct TrainConfig {
    long epochs = 10000;
    double learning_rate = 0.05;
    double weight_decay = 0.01;  // Frobenius penalty on the interaction factors only
    double momentum = 0.5;
    long batch_size = 100;
    int cd_steps = 1;
    std::uint64_t seed = 0;
    // When set, the chain's visible states are propagated as probabilities
    // instead of being sampled (hidden states are always sampled).
    bool mean_field_negative = false;

    void validate() const {
        if (epochs < 1) throw UsageError("epochs must be >= 1");
        if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be > 0");
        if (weight_decay < 0.0) throw UsageError("weight_decay must be >= 0");
        if (momentum < 0.0 || momentum >= 1.0) throw UsageError("momentum must be in [0, 1)");
        if (batch_size < 1) throw UsageError("batch_size must be >= 1");
        if (cd_steps < 1) throw UsageError("cd_steps must be >= 1");
    }
};

struct GradientIncrement {
    Matrix dU, dV, dB, dC;

    static GradientIncrement zeros_like(const MvrbmParams& p) {
        return {Matrix::Zero(p.U.rows(), p.U.cols()), Matrix::Zero(p.V.rows(), p.V.cols()),
                Matrix::Zero(p.B.rows(), p.B.cols()), Matrix::Zero(p.C.rows(), p.C.cols())};
    }
    void scale(double s) {
        dU *= s;
        dV *= s;
        dB *= s;
        dC *= s;
    }
};

struct EpochReport {
    long epoch = 0;          // 1-based
    double recon_error = 0;  // mean per-pixel |data - mean-field reconstruction|
    double grad_norm_u = 0, grad_norm_v = 0, grad_norm_b = 0, grad_norm_c = 0;
    double seconds = 0;
};

// Called after every completed epoch; lets callers stream telemetry so that
// rows survive a later divergence abort.
using EpochObserver = std::function<void(const EpochReport&)>;

// CD-K ascent direction (data phase minus chain phase), averaged over the
// batch. The positive phase uses mean-field hidden probabilities; the
// negative phase statistics come from the visible state after cd_steps
// alternating Gibbs transitions started at each sample.
GradientIncrement cd_gradient(const std::vector<Matrix>& batch, const MvrbmParams& params,
                              int cd_steps, Rng& rng, bool mean_field_negative = false);

// One momentum step:
//   velocity <- momentum * velocity + lr * (incr - decay * theta)
//   theta    <- theta + velocity
// The decay term applies to U and V only. Throws DivergenceError when the
// updated parameters go non-finite or beyond 1e6 in magnitude.
void apply_update(MvrbmParams& params, const GradientIncrement& incr, GradientIncrement& velocity,
                  const TrainConfig& cfg);

std::pair<MvrbmParams, std::vector<EpochReport>> train(const std::vector<Matrix>& data,
                                                       const LayerShape& shape,
                                                       const TrainConfig& cfg,
                                                       const EpochObserver& observer = {});

// Free-parameter counts: factored bilinear model vs the dense classic RBM on
// the vectorized layers. Returns {I*K + L*J + I*J + K*L, I*J*K*L + I*J + K*L}.
std::pair<long, long> param_count(const LayerShape& shape);

void write_telemetry_csv(const std::vector<EpochReport>& reports, const std::string& path);

namespace detail {

constexpr double kDivergenceCap = 1e6;

template <class Mat>
void momentum_step(Mat& theta, Mat& velocity, const Mat& ascent, double lr, double momentum,
                   double decay) {
    velocity = momentum * velocity + lr * (ascent - decay * theta);
    theta += velocity;
}

// Per-sample CD statistics, shared with the multimodal trainer so that its
// single-channel degenerate case reproduces the plain trainer bit for bit.
// x0/h0 are the data sample and its hidden probabilities, xk/hk the chain
// state after K transitions and its hidden probabilities. Unnormalized.
inline void accumulate_primary_stats(const MvrbmParams& p, const Matrix& x0, const Matrix& h0,
                                     const Matrix& xk, const Matrix& hk, GradientIncrement& g) {
    g.dU.noalias() += h0 * p.V * x0.transpose();
    g.dU.noalias() -= hk * p.V * xk.transpose();
    g.dV.noalias() += h0.transpose() * p.U * x0;
    g.dV.noalias() -= hk.transpose() * p.U * xk;
    g.dB += x0 - xk;
    g.dC += h0 - hk;
}

inline Matrix mean_field_reconstruction(const Matrix& hidden_probs, const MvrbmParams& p) {
    return sigmoid(visible_preactivation(hidden_probs, p));
}

inline void momentum_update_mvrbm(MvrbmParams& p, GradientIncrement& velocity,
                                  const GradientIncrement& incr, const TrainConfig& cfg) {
    momentum_step(p.U, velocity.dU, incr.dU, cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    momentum_step(p.V, velocity.dV, incr.dV, cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    momentum_step(p.B, velocity.dB, incr.dB, cfg.learning_rate, cfg.momentum, 0.0);
    momentum_step(p.C, velocity.dC, incr.dC, cfg.learning_rate, cfg.momentum, 0.0);
}

inline bool mvrbm_params_ok(const MvrbmParams& p) {
    if (!p.U.allFinite() || !p.V.allFinite() || !p.B.allFinite() || !p.C.allFinite()) return false;
    const double m = std::max({p.U.cwiseAbs().maxCoeff(), p.V.cwiseAbs().maxCoeff(),
                               p.B.cwiseAbs().maxCoeff(), p.C.cwiseAbs().maxCoeff()});
    return m <= kDivergenceCap;
}

// Shared training loop: shuffled mini-batches, momentum updates, per-epoch
// telemetry, divergence guard. A family provides the model-specific pieces:
//
//   typename Params, typename Grad;
//   std::size_t size() const;                       dataset size
//   Params init(Rng&) const;
//   Grad zero_grad() const;
//   double cd_batch(const Params&, const std::size_t* idx, std::size_t n,
//                   const TrainConfig&, Rng&, Grad& out) const;
//       accumulates the batch-mean ascent direction into `out`, returns the
//       summed per-sample reconstruction MAE
//   void update(Params&, Grad& velocity, const Grad& incr, const TrainConfig&) const;
//   bool params_ok(const Params&) const;
//   std::array<double, 4> grad_norms(const Grad&) const;
template <class Family>
std::pair<typename Family::Params, std::vector<EpochReport>> run_cd_training(
    const Family& family, const TrainConfig& cfg, const EpochObserver& observer = {}) {
    cfg.validate();
    const std::size_t n = family.size();
    if (n == 0) throw UsageError("training dataset is empty");

    Rng rng(cfg.seed);
    auto params = family.init(rng);
    auto velocity = family.zero_grad();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t bsz = static_cast<std::size_t>(cfg.batch_size);
    const std::size_t n_batches = (n + bsz - 1) / bsz;

    std::vector<EpochReport> reports;
    reports.reserve(static_cast<std::size_t>(cfg.epochs));
    for (long epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        rng.shuffle(order);
        double mae_sum = 0.0;
        std::array<double, 4> norm_sum{};
        for (std::size_t m = 0; m < n_batches; ++m) {
            const std::size_t first = m * bsz;
            const std::size_t count = std::min(bsz, n - first);
            auto incr = family.zero_grad();
            mae_sum += family.cd_batch(params, order.data() + first, count, cfg, rng, incr);
            family.update(params, velocity, incr, cfg);
            if (!family.params_ok(params))
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(m + 1));
            const auto norms = family.grad_norms(incr);
            for (int i = 0; i < 4; ++i) norm_sum[i] += norms[i];
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double nb = static_cast<double>(n_batches);
        reports.push_back({epoch, mae_sum / static_cast<double>(n), norm_sum[0] / nb,
                           norm_sum[1] / nb, norm_sum[2] / nb, norm_sum[3] / nb, secs});
        if (observer) observer(reports.back());
    }
    return {std::move(params), std::move(reports)};
}

}  // namespace detail

}  // namespace mvrbm

#endif
