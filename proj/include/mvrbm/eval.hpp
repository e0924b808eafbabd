#ifndef MVRBM_EVAL_HPP
#define MVRBM_EVAL_HPP

#include <vector>

#include "mvrbm/model.hpp"
#include "mvrbm/types.hpp"

namespace mvrbm {

// RMSE and PSNR are reported on the 8-bit scale (unit-interval pixels are
// multiplied by 255), so psnr = 20*log10(255 / rmse). rmse == 0 maps to an
// infinite PSNR sentinel.
struct Metrics {
    double rmse = 0.0;
    double psnr = 0.0;
    double per_pixel_mae = 0.0;
};

Metrics psnr(const Matrix& reference, const Matrix& test);

struct ReconError {
    double total = 0.0;      // sum |orig - recon| over pixels
    double per_pixel = 0.0;  // total / pixel count
};

ReconError reconstruction_error(const Matrix& original, const Matrix& reconstructed);

// Column-major flattening of the mean-field hidden activation; length K*L.
Vector hidden_features(const Matrix& X, const MvrbmParams& params);

struct KnnResult {
    std::vector<int> predicted;
    double error_rate = 0.0;
};

// Euclidean 1-NN (k = 1 default); distance ties resolve to the lowest
// training index, vote ties for k > 1 to the closest tied neighbor.
// Feature matrices hold one sample per row.
KnnResult knn_classify(const Matrix& train_features, const std::vector<int>& train_labels,
                       const Matrix& test_features, const std::vector<int>& test_labels,
                       int k = 1);

}  // namespace mvrbm

#endif
