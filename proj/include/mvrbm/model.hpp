#ifndef MVRBM_MODEL_HPP
#define MVRBM_MODEL_HPP

#include <utility>
#include <vector>

#include "mvrbm/rng.hpp"
#include "mvrbm/types.hpp"

namespace mvrbm {

// Bilinear-energy model over a binary visible matrix X (I x J) and a binary
// hidden matrix Y (K x L):
//
//   E(X, Y) = -tr(U^T Y V X^T) - tr(X^T B) - tr(Y^T C)
//
// The pairwise weight between x_ij and y_kl is u_ki * v_lj, so the full
// I*J*K*L weight tensor is never materialized.
struct MvrbmParams {
    Matrix U;  // K x I
    Matrix V;  // L x J
    Matrix B;  // I x J, visible bias
    Matrix C;  // K x L, hidden bias

    Index visible_rows() const { return B.rows(); }
    Index visible_cols() const { return B.cols(); }
    Index hidden_rows() const { return C.rows(); }
    Index hidden_cols() const { return C.cols(); }
    LayerShape shape() const { return {visible_rows(), visible_cols(), hidden_rows(), hidden_cols()}; }

    void validate() const;

    static MvrbmParams zeros(const LayerShape& shape);
};

// U, V ~ N(0, 0.1^2) drawn row-major from the stream (U first), biases zero.
MvrbmParams init_params(const LayerShape& shape, Rng& rng);

double energy(const Matrix& X, const Matrix& Y, const MvrbmParams& params);

// Unfactored form with an explicit I x J x K x L weight tensor, flat
// row-major (((i*J + j)*K + k)*L + l). Test surface only; never trained.
double full_tensor_energy(const Matrix& X, const Matrix& Y, const std::vector<double>& W4,
                          const Matrix& B, const Matrix& C);

// Builds the flat tensor with w_ijkl = u_ki * v_lj (for cross-checks).
std::vector<double> factored_tensor(const MvrbmParams& params);

// Conditional means. Every entry lies strictly inside (0, 1).
//   visible: sigma(U^T Y V + B), element fields p(x_ij = 1 | Y)
//   hidden:  sigma(U X V^T + C), element fields p(y_kl = 1 | X)
Matrix visible_activation(const Matrix& Y, const MvrbmParams& params);
Matrix hidden_activation(const Matrix& X, const MvrbmParams& params);

// Pre-activations (shared with the multimodal extension).
inline Matrix hidden_preactivation(const Matrix& X, const MvrbmParams& p) {
    return p.U * X * p.V.transpose() + p.C;
}
inline Matrix visible_preactivation(const Matrix& Y, const MvrbmParams& p) {
    return p.U.transpose() * Y * p.V + p.B;
}

// Each entry is 1 with the given probability, independently. Consumes exactly
// rows*cols uniform draws in row-major order.
Matrix sample_bernoulli(const Matrix& activation, Rng& rng);

// One alternating Gibbs transition: Y ~ p(Y|X), then X' ~ p(X|Y), in that
// order. Returns (Y, X').
std::pair<Matrix, Matrix> gibbs_step(const Matrix& X, const MvrbmParams& params, Rng& rng);

// Weight matrix W of the equivalent classic RBM on vectorized states:
// vec(X)^T W vec(Y) = tr(U^T Y V X^T) for all X, Y, with vec column-major.
// W = kron(V^T, U^T), sized (I*J) x (K*L).
Matrix kron_weight(const MvrbmParams& params);

}  // namespace mvrbm

#endif
