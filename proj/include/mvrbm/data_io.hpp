#ifndef MVRBM_DATA_IO_HPP
#define MVRBM_DATA_IO_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mvrbm/multimodal.hpp"
#include "mvrbm/rng.hpp"
#include "mvrbm/types.hpp"

namespace mvrbm {

// Grayscale images are plain matrices with entries in [0, 1].

struct LabeledDataset {
    std::vector<Matrix> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
};

// Big-endian IDX containers (image magic 0x00000803, label magic 0x00000801).
// Pixel bytes are scaled by 1/255 on load.
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);
void save_idx(const LabeledDataset& data, const std::string& images_path,
              const std::string& labels_path);

// Binary PGM (P5) and PPM (P6), maxval 255.
Matrix read_pgm(const std::string& path);
void write_pgm(const Matrix& img, const std::string& path);

struct ImageRgb {
    Matrix r, g, b;
};
ImageRgb read_ppm(const std::string& path);
void write_ppm(const ImageRgb& img, const std::string& path);

bool is_ppm_file(const std::string& path);

// One image path per line; blank lines and '#' comments skipped. Paths are
// resolved relative to the manifest's directory.
std::vector<std::string> read_manifest(const std::string& path);

// entry = 1 iff pixel > threshold.
Matrix binarize(const Matrix& img, double threshold = 0.5);
// entry ~ Bernoulli(pixel), row-major draw order.
Matrix binarize_stochastic(const Matrix& img, Rng& rng);

// Overwrites exactly round(fraction * pixel_count) distinct pixels, chosen
// without replacement (partial Fisher-Yates over flat row-major indices),
// each set to 0 or 1 with probability 1/2. Draw order: the index draws
// first, then one value draw per chosen pixel.
Matrix salt_pepper(const Matrix& img, double fraction, Rng& rng);

// Directional derivative maps (x, y, xx, yy) by correlation with
// [-1, 0, 1], its transpose, [1, 0, -2, 0, 1], and its transpose.
// Replicate padding; output sizes equal the input size.
std::array<Matrix, 4> extract_features(const Matrix& img);

// Fixed affine maps taking raw derivative ranges into [0, 1] and back
// (first-order kernels span [-1, 1] on unit images, second-order [-2, 2]).
Matrix normalize_feature(const Matrix& raw, int feature_index);

// Keys bicubic kernel (a = -0.5), replicate edges, pixel-center alignment,
// output clamped to [0, 1]. Output dimension = round(dim * factor).
Matrix bicubic_resize(const Matrix& img, double factor);
Matrix nearest_resize(const Matrix& img, double factor);

// Full-range BT.601: Y in [0, 1], Cb/Cr centered at 0.5.
struct YCbCr {
    Matrix y, cb, cr;
};
YCbCr ycbcr_split(const ImageRgb& rgb);
ImageRgb ycbcr_merge(const YCbCr& ycc);

struct PatchOrigin {
    std::size_t image_index;
    Index row, col;
};

struct PatchSet {
    std::vector<MultimodalSample> samples;
    std::vector<PatchOrigin> origins;
};

// Draws patch_count patches at uniform-random positions across the corpus.
// Each sample pairs the original-resolution patch with the four normalized
// derivative maps of its degraded counterpart (the image downscaled by
// 1/factor and bicubically upscaled back). Draw order per patch: image
// index, row, column.
PatchSet sample_patches(const std::vector<Matrix>& corpus, Index patch, std::size_t patch_count,
                        double factor, Rng& rng);

inline Matrix clamp_unit(Matrix m) {
    return m.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace mvrbm

#endif
