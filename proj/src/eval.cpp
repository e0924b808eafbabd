#include "mvrbm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace mvrbm {

Metrics psnr(const Matrix& reference, const Matrix& test) {
    require_shape(test, reference.rows(), reference.cols(), "test image");
    const Matrix diff = (reference - test) * 255.0;
    Metrics m;
    m.rmse = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
    m.per_pixel_mae = (reference - test).cwiseAbs().sum() / static_cast<double>(diff.size());
    m.psnr = m.rmse == 0.0 ? std::numeric_limits<double>::infinity()
                           : 20.0 * std::log10(255.0 / m.rmse);
    return m;
}

ReconError reconstruction_error(const Matrix& original, const Matrix& reconstructed) {
    require_shape(reconstructed, original.rows(), original.cols(), "reconstruction");
    ReconError e;
    e.total = (original - reconstructed).cwiseAbs().sum();
    e.per_pixel = e.total / static_cast<double>(original.size());
    return e;
}

Vector hidden_features(const Matrix& X, const MvrbmParams& params) {
    const Matrix h = hidden_activation(X, params);
    return Eigen::Map<const Vector>(h.data(), h.size());
}

KnnResult knn_classify(const Matrix& train_features, const std::vector<int>& train_labels,
                       const Matrix& test_features, const std::vector<int>& test_labels,
                       int k) {
    if (train_features.rows() == 0) throw UsageError("knn_classify: empty training set");
    if (static_cast<std::size_t>(train_features.rows()) != train_labels.size())
        throw DimensionError("knn_classify: train labels do not match feature rows");
    if (static_cast<std::size_t>(test_features.rows()) != test_labels.size())
        throw DimensionError("knn_classify: test labels do not match feature rows");
    if (train_features.cols() != test_features.cols())
        throw DimensionError("knn_classify: feature dimensions differ (" +
                             std::to_string(train_features.cols()) + " vs " +
                             std::to_string(test_features.cols()) + ")");
    if (k < 1) throw UsageError("knn_classify: k must be >= 1");
    const int kk = std::min<int>(k, static_cast<int>(train_features.rows()));

    const Vector train_sq = train_features.rowwise().squaredNorm();
    KnnResult res;
    res.predicted.resize(test_labels.size());
    std::size_t wrong = 0;

    // Squared distances in blocks via d2 = |a|^2 + |b|^2 - 2 a.b.
    const Index block = 256;
    for (Index t0 = 0; t0 < test_features.rows(); t0 += block) {
        const Index nb = std::min<Index>(block, test_features.rows() - t0);
        const Matrix cross = train_features * test_features.middleRows(t0, nb).transpose();
        const Vector test_sq = test_features.middleRows(t0, nb).rowwise().squaredNorm();
        for (Index t = 0; t < nb; ++t) {
            if (kk == 1) {
                Index best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (Index n = 0; n < train_features.rows(); ++n) {
                    const double d = train_sq(n) + test_sq(t) - 2.0 * cross(n, t);
                    if (d < best_d) {
                        best_d = d;
                        best = n;
                    }
                }
                res.predicted[t0 + t] = train_labels[best];
            } else {
                std::vector<std::pair<double, Index>> dist(train_features.rows());
                for (Index n = 0; n < train_features.rows(); ++n)
                    dist[n] = {train_sq(n) + test_sq(t) - 2.0 * cross(n, t), n};
                std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
                std::map<int, int> votes;
                for (int i = 0; i < kk; ++i) ++votes[train_labels[dist[i].second]];
                int best_label = train_labels[dist[0].second];
                int best_count = 0;
                for (int i = 0; i < kk; ++i) {
                    const int label = train_labels[dist[i].second];
                    if (votes[label] > best_count) {
                        best_count = votes[label];
                        best_label = label;
                    }
                }
                res.predicted[t0 + t] = best_label;
            }
            if (res.predicted[t0 + t] != test_labels[t0 + t]) ++wrong;
        }
    }
    res.error_rate = test_labels.empty() ? 0.0
                                         : static_cast<double>(wrong) /
                                               static_cast<double>(test_labels.size());
    return res;
}

}  // namespace mvrbm
