#include "support/synthetic.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>

namespace testsupport {

using mvrbm::Index;
using mvrbm::Matrix;

mvrbm::MvrbmParams random_params(Index I, Index J, Index K, Index L, mvrbm::Rng& rng,
                                 double scale) {
    mvrbm::MvrbmParams p = mvrbm::MvrbmParams::zeros({I, J, K, L});
    auto fill = [&](Matrix& m) {
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, scale);
    };
    fill(p.U);
    fill(p.V);
    fill(p.B);
    fill(p.C);
    return p;
}

mvrbm::MultimodalParams random_mm_params(const mvrbm::MultimodalShape& shape, mvrbm::Rng& rng,
                                         double scale) {
    mvrbm::MultimodalParams p;
    p.base = random_params(shape.primary.visible_rows, shape.primary.visible_cols,
                           shape.primary.hidden_rows, shape.primary.hidden_cols, rng, scale);
    for (const auto& [h, w] : shape.channels) {
        mvrbm::ChannelParams ch{Matrix(shape.primary.hidden_rows, h),
                                Matrix(shape.primary.hidden_cols, w), Matrix(h, w)};
        auto fill = [&](Matrix& m) {
            for (Index i = 0; i < m.rows(); ++i)
                for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, scale);
        };
        fill(ch.Q);
        fill(ch.R);
        fill(ch.A);
        p.channels.push_back(std::move(ch));
    }
    return p;
}

namespace {

// Segment masks for a 7-segment display: t, tl, tr, m, bl, br, b.
constexpr int kSegments[10] = {
    0b1110111,  // 0
    0b0010010,  // 1
    0b1011101,  // 2
    0b1011011,  // 3
    0b0111010,  // 4
    0b1101011,  // 5
    0b1101111,  // 6
    0b1010010,  // 7
    0b1111111,  // 8
    0b1111011,  // 9
};

void fill_rect(Matrix& img, int r0, int r1, int c0, int c1) {
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (r >= 0 && r < img.rows() && c >= 0 && c < img.cols()) img(r, c) = 1.0;
}

}  // namespace

Matrix render_digit(int digit, int shift_r, int shift_c) {
    Matrix img = Matrix::Zero(28, 28);
    const int mask = kSegments[digit % 10];
    // Glyph box: rows 3..24, cols 6..21, strokes 3px thick.
    const int top = 3 + shift_r, bottom = 24 + shift_r;
    const int mid = (top + bottom) / 2;
    const int left = 6 + shift_c, right = 21 + shift_c;
    if (mask & 0b1000000) fill_rect(img, top, top + 2, left, right);           // t
    if (mask & 0b0100000) fill_rect(img, top, mid, left, left + 2);            // tl
    if (mask & 0b0010000) fill_rect(img, top, mid, right - 2, right);          // tr
    if (mask & 0b0001000) fill_rect(img, mid - 1, mid + 1, left, right);       // m
    if (mask & 0b0000100) fill_rect(img, mid, bottom, left, left + 2);         // bl
    if (mask & 0b0000010) fill_rect(img, mid, bottom, right - 2, right);       // br
    if (mask & 0b0000001) fill_rect(img, bottom - 2, bottom, left, right);     // b
    return img;
}

mvrbm::LabeledDataset synthetic_digits(std::size_t count, mvrbm::Rng& rng, int fixed_digit,
                                       int max_shift, double flip_fraction, int occlusion) {
    mvrbm::LabeledDataset out;
    out.images.reserve(count);
    out.labels.reserve(count);
    const int span = 2 * max_shift + 1;
    for (std::size_t n = 0; n < count; ++n) {
        const int digit =
            fixed_digit >= 0 ? fixed_digit : static_cast<int>(rng.index_below(10));
        const int dr = static_cast<int>(rng.index_below(static_cast<std::size_t>(span))) - max_shift;
        const int dc = static_cast<int>(rng.index_below(static_cast<std::size_t>(span))) - max_shift;
        Matrix img = render_digit(digit, dr, dc);
        for (Index i = 0; i < img.rows(); ++i)
            for (Index j = 0; j < img.cols(); ++j)
                if (rng.uniform() < flip_fraction) img(i, j) = 1.0 - img(i, j);
        if (occlusion > 0) {
            const Index r0 = static_cast<Index>(rng.index_below(28 - occlusion));
            const Index c0 = static_cast<Index>(rng.index_below(28 - occlusion));
            img.block(r0, c0, occlusion, occlusion).setZero();
        }
        out.images.push_back(std::move(img));
        out.labels.push_back(digit);
    }
    return out;
}

Matrix synthetic_natural_image(Index rows, Index cols, mvrbm::Rng& rng) {
    Matrix img(rows, cols);
    const double a = 0.3 + 0.4 * rng.uniform();
    const double gx = rng.normal(0.0, 0.25), gy = rng.normal(0.0, 0.25);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            img(i, j) = a + gx * (static_cast<double>(j) / cols - 0.5) +
                        gy * (static_cast<double>(i) / rows - 0.5);

    const int blobs = 6 + static_cast<int>(rng.index_below(5));
    for (int b = 0; b < blobs; ++b) {
        const double cr = rng.uniform() * rows, cc = rng.uniform() * cols;
        const double rr = (0.08 + 0.2 * rng.uniform()) * rows;
        const double rc = (0.08 + 0.2 * rng.uniform()) * cols;
        const double amp = rng.normal(0.0, 0.25);
        const double soft = 0.6 + 2.0 * rng.uniform();  // edge sharpness in pixels
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) {
                const double di = (i - cr) / rr, dj = (j - cc) / rc;
                const double d = std::sqrt(di * di + dj * dj);
                img(i, j) += amp * mvrbm::sigmoid((1.0 - d) * rr / soft);
            }
    }

    const double freq = 2.0 + 5.0 * rng.uniform();
    const double theta = rng.uniform() * M_PI;
    const double amp = 0.04 + 0.05 * rng.uniform();
    const double phase = rng.uniform() * 2.0 * M_PI;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double t = std::cos(theta) * j / cols + std::sin(theta) * i / rows;
            img(i, j) += amp * std::sin(2.0 * M_PI * freq * t + phase);
        }

    const double lo = img.minCoeff(), hi = img.maxCoeff();
    img = (img.array() - lo) / std::max(1e-12, hi - lo) * 0.9 + 0.05;
    return img;
}

Matrix synthetic_sharp_image(Index rows, Index cols, mvrbm::Rng& rng) {
    const double palette[6] = {0.10, 0.26, 0.42, 0.58, 0.74, 0.90};
    Matrix img = Matrix::Constant(rows, cols, palette[rng.index_below(6)]);
    const int rects = 8 + static_cast<int>(rng.index_below(6));
    for (int t = 0; t < rects; ++t) {
        const Index r0 = static_cast<Index>(rng.index_below(static_cast<std::size_t>(rows)));
        const Index c0 = static_cast<Index>(rng.index_below(static_cast<std::size_t>(cols)));
        const Index h = 4 + static_cast<Index>(rng.index_below(static_cast<std::size_t>(rows / 2)));
        const Index w = 4 + static_cast<Index>(rng.index_below(static_cast<std::size_t>(cols / 2)));
        const double v = palette[rng.index_below(6)];
        for (Index i = r0; i < std::min(rows, r0 + h); ++i)
            for (Index j = c0; j < std::min(cols, c0 + w); ++j) img(i, j) = v;
    }
    const int lines = 2 + static_cast<int>(rng.index_below(3));
    for (int t = 0; t < lines; ++t) {
        const double v = palette[rng.index_below(6)];
        if (rng.uniform() < 0.5) {
            const Index r = static_cast<Index>(rng.index_below(static_cast<std::size_t>(rows - 1)));
            img.block(r, 0, 2, cols).setConstant(v);
        } else {
            const Index c = static_cast<Index>(rng.index_below(static_cast<std::size_t>(cols - 1)));
            img.block(0, c, rows, 2).setConstant(v);
        }
    }
    return img;
}

std::string make_temp_dir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() /
                     ("mvrbm_tests_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1)));
    fs::create_directories(dir);
    return dir.string();
}

}  // namespace testsupport
