#ifndef MVRBM_TESTS_SYNTHETIC_HPP
#define MVRBM_TESTS_SYNTHETIC_HPP

#include <string>
#include <vector>

#include "mvrbm/data_io.hpp"
#include "mvrbm/model.hpp"
#include "mvrbm/multimodal.hpp"
#include "mvrbm/rng.hpp"

// Deterministic synthetic corpora for tests: the pipelines consume standard
// IDX/PGM inputs, and these generators produce structured stand-ins at MNIST
// shapes without shipping any dataset.
namespace testsupport {

mvrbm::MvrbmParams random_params(mvrbm::Index I, mvrbm::Index J, mvrbm::Index K, mvrbm::Index L,
                                 mvrbm::Rng& rng, double scale = 0.8);

mvrbm::MultimodalParams random_mm_params(const mvrbm::MultimodalShape& shape, mvrbm::Rng& rng,
                                         double scale = 0.8);

// Seven-segment style digit glyph on a 28x28 canvas, binary pixels,
// translated by (shift_r, shift_c).
mvrbm::Matrix render_digit(int digit, int shift_r, int shift_c);

// Labeled 28x28 digit corpus: uniform class draw (or a fixed digit), random
// shifts in [-max_shift, max_shift], a fraction of flipped pixels, and an
// optional square occlusion blanked at a random position.
mvrbm::LabeledDataset synthetic_digits(std::size_t count, mvrbm::Rng& rng, int fixed_digit = -1,
                                       int max_shift = 2, double flip_fraction = 0.05,
                                       int occlusion = 0);

// Piecewise-smooth grayscale image (gradient + soft blobs + texture) used as
// a super-resolution corpus stand-in. Values stay inside [0.05, 0.95].
mvrbm::Matrix synthetic_natural_image(mvrbm::Index rows, mvrbm::Index cols, mvrbm::Rng& rng);

// Piecewise-constant image: overlapping axis-aligned rectangles and thin
// lines drawn from a small intensity palette. Sharp step edges make plain
// interpolation struggle, which is the regime the patch model targets.
mvrbm::Matrix synthetic_sharp_image(mvrbm::Index rows, mvrbm::Index cols, mvrbm::Rng& rng);

// Fresh directory under the system temp root; unique per call.
std::string make_temp_dir(const std::string& tag);

}  // namespace testsupport

#endif
