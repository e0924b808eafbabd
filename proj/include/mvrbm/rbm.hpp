#ifndef MVRBM_RBM_HPP
#define MVRBM_RBM_HPP

#include <utility>
#include <vector>

#include "mvrbm/model.hpp"
#include "mvrbm/trainer.hpp"

namespace mvrbm {

// Classic vector RBM: E(x, y) = -x^T W y - b^T x - c^T y.
struct RbmParams {
    Matrix W;  // visible_dim x hidden_dim
    Vector b;  // visible bias
    Vector c;  // hidden bias

    Index visible_dim() const { return b.size(); }
    Index hidden_dim() const { return c.size(); }
    void validate() const;
};

struct RbmGradient {
    Matrix dW;
    Vector db, dc;

    static RbmGradient zeros(Index visible_dim, Index hidden_dim) {
        return {Matrix::Zero(visible_dim, hidden_dim), Vector::Zero(visible_dim),
                Vector::Zero(hidden_dim)};
    }
    void scale(double s) {
        dW *= s;
        db *= s;
        dc *= s;
    }
};

double rbm_energy(const Vector& x, const Vector& y, const RbmParams& params);

// sigma(W^T x + c) and sigma(W y + b).
Vector rbm_hidden_activation(const Vector& x, const RbmParams& params);
Vector rbm_visible_activation(const Vector& y, const RbmParams& params);

Vector sample_bernoulli(const Vector& activation, Rng& rng);

// The classic RBM that induces the same joint distribution as the factored
// model on column-major vectorized states.
RbmParams kron_instantiate(const MvrbmParams& params);

// Column-major flattening used throughout for image <-> vector conversion.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, Index rows, Index cols);

RbmGradient rbm_cd_gradient(const std::vector<Vector>& batch, const RbmParams& params,
                            int cd_steps, Rng& rng, bool mean_field_negative = false);

// Same schedule, batching, momentum, and decay treatment as train(); the
// decay penalty lands on W (the interaction weights).
std::pair<RbmParams, std::vector<EpochReport>> rbm_train(const std::vector<Vector>& data,
                                                         Index visible_dim, Index hidden_dim,
                                                         const TrainConfig& cfg,
                                                         const EpochObserver& observer = {});

}  // namespace mvrbm

#endif
