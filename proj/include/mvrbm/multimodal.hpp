#ifndef MVRBM_MULTIMODAL_HPP
#define MVRBM_MULTIMODAL_HPP

#include <utility>
#include <vector>

#include "mvrbm/model.hpp"
#include "mvrbm/trainer.hpp"

namespace mvrbm {

// Extra visible channel e (H_e x W_e) coupled to the shared hidden matrix
// through its own factor pair, contributing -tr(Q^T Y R Z^T) - tr(Z^T A).
struct ChannelParams {
    Matrix Q;  // K x H_e
    Matrix R;  // L x W_e
    Matrix A;  // H_e x W_e, channel visible bias
};

// Several visible matrix channels sharing one hidden matrix. The primary
// channel and the shared hidden bias live in `base`; energies and gradients
// are sums of per-channel bilinear terms.
struct MultimodalParams {
    MvrbmParams base;
    std::vector<ChannelParams> channels;

    Index hidden_rows() const { return base.hidden_rows(); }
    Index hidden_cols() const { return base.hidden_cols(); }
    std::size_t channel_count() const { return channels.size(); }
    void validate() const;
};

struct MultimodalShape {
    LayerShape primary;
    std::vector<std::pair<Index, Index>> channels;  // (H_e, W_e)

    void validate() const;
};

// One training sample: primary patch plus the per-channel feature matrices,
// all with entries in [0, 1] (continuous values are treated as unit means).
struct MultimodalSample {
    Matrix x;
    std::vector<Matrix> channels;
};

struct ChannelGradient {
    Matrix dQ, dR, dA;
};

struct MmGradient {
    GradientIncrement primary;
    std::vector<ChannelGradient> channels;

    static MmGradient zeros_like(const MultimodalParams& p);
    void scale(double s);
};

double mm_energy(const MultimodalSample& sample, const Matrix& Y, const MultimodalParams& params);

// sigma(U X V^T + sum_e Q_e Z_e R_e^T + C)
Matrix mm_hidden_activation(const MultimodalSample& sample, const MultimodalParams& params);

// channel 0 is the primary (sigma(U^T Y V + B)); channel e in 1..E selects
// the extra channel (sigma(Q_e^T Y R_e + A_e)).
Matrix mm_visible_activation(const Matrix& Y, const MultimodalParams& params, std::size_t channel);

MultimodalParams mm_init_params(const MultimodalShape& shape, Rng& rng);

MmGradient mm_cd_gradient(const std::vector<MultimodalSample>& batch,
                          const MultimodalParams& params, int cd_steps, Rng& rng,
                          bool mean_field_negative = false);

std::pair<MultimodalParams, std::vector<EpochReport>> mm_train(
    const std::vector<MultimodalSample>& data, const MultimodalShape& shape,
    const TrainConfig& cfg, const EpochObserver& observer = {});

// Deterministic mean-field inference: the feature channels stay clamped, the
// primary estimate starts from x0 and is refreshed through the hidden layer
// for the given number of cycles. No randomness is consumed.
Matrix sr_infer(const std::vector<Matrix>& features, const Matrix& x0,
                const MultimodalParams& params, int cycles);

}  // namespace mvrbm

#endif
