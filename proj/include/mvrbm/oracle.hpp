#ifndef MVRBM_ORACLE_HPP
#define MVRBM_ORACLE_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "mvrbm/multimodal.hpp"
#include "mvrbm/trainer.hpp"

namespace mvrbm {

// Exact inference on tiny models by exhaustive enumeration of every joint
// binary state. State indexing is row-major bit order: bit (i*cols + j) of a
// state index holds entry (i, j); joint states are indexed
// (visible_index << hidden_bits) | hidden_index.
//
// The total bit count is capped at 20 (about one million states).
struct ExactModel {
    MvrbmParams params;
    double log_z = 0.0;
    int visible_bits = 0;
    int hidden_bits = 0;
    std::vector<double> joint;             // probability per joint state
    std::vector<double> visible_marginal;  // p(X = x)
    std::vector<double> hidden_marginal;   // p(Y = y)

    std::size_t visible_states() const { return std::size_t{1} << visible_bits; }
    std::size_t hidden_states() const { return std::size_t{1} << hidden_bits; }

    Matrix decode_visible(std::size_t x_idx) const;
    Matrix decode_hidden(std::size_t y_idx) const;

    double joint_prob(std::size_t x_idx, std::size_t y_idx) const {
        return joint[(x_idx << hidden_bits) | y_idx];
    }

    // Exact conditionals computed from the joint table (not via the sigmoid
    // closed form, so they can cross-check it).
    Matrix exact_visible_conditional(std::size_t y_idx) const;  // p(x_ij = 1 | Y)
    Matrix exact_hidden_conditional(std::size_t x_idx) const;   // p(y_kl = 1 | X)

    // One joint sample by inverse-CDF scan; consumes exactly one uniform draw.
    std::pair<Matrix, Matrix> sample(Rng& rng) const;
};

std::size_t encode_state(const Matrix& m);  // row-major bit order

ExactModel enumerate_model(const MvrbmParams& params);

// log Z via the per-entry product form after marginalizing X analytically;
// agrees with enumeration and stays cheap for larger visible layers.
double log_z_factored(const MvrbmParams& params);

// Mean log-likelihood of the data under the exact model.
double exact_loglik(const std::vector<Matrix>& data, const MvrbmParams& params);

// Exact ascent gradient of the mean log-likelihood: data expectation minus
// model expectation of the energy slope, with the model expectation taken
// over the enumerated joint.
GradientIncrement exact_loglik_gradient(const std::vector<Matrix>& data,
                                        const MvrbmParams& params);

// Multimodal analogues. Visible state bits are laid out primary-first, then
// each extra channel in order; the joint index appends hidden bits low.
struct MmExactModel {
    MultimodalParams params;
    double log_z = 0.0;
    int visible_bits = 0;  // primary + all channels
    int hidden_bits = 0;
    std::vector<double> joint;
    std::vector<double> visible_marginal;

    std::size_t visible_states() const { return std::size_t{1} << visible_bits; }
    std::size_t hidden_states() const { return std::size_t{1} << hidden_bits; }

    MultimodalSample decode_visible(std::size_t v_idx) const;
    double joint_prob(std::size_t v_idx, std::size_t y_idx) const {
        return joint[(v_idx << hidden_bits) | y_idx];
    }
};

MmExactModel mm_enumerate_model(const MultimodalParams& params);
double mm_exact_loglik(const std::vector<MultimodalSample>& data, const MultimodalParams& params);
MmGradient mm_exact_loglik_gradient(const std::vector<MultimodalSample>& data,
                                    const MultimodalParams& params);

}  // namespace mvrbm

#endif
