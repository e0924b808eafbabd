#include "mvrbm/data_io.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace mvrbm {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return in;
}

unsigned char to_byte(double v) {
    const double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return static_cast<unsigned char>(std::lround(c * 255.0));
}

// PNM header token: skips whitespace and '#' comments.
std::string pnm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    throw DataError(path + ": truncated header");
}

std::pair<Index, Index> pnm_dims(std::istream& in, const std::string& path) {
    const long w = std::stol(pnm_token(in, path));
    const long h = std::stol(pnm_token(in, path));
    const long maxval = std::stol(pnm_token(in, path));
    if (w < 1 || h < 1) throw DataError(path + ": bad dimensions");
    if (maxval != 255) throw DataError(path + ": only maxval 255 supported, got " + std::to_string(maxval));
    in.get();  // single whitespace after maxval
    return {static_cast<Index>(h), static_cast<Index>(w)};
}

double keys_cubic(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return a * (((x - 5.0) * x + 8.0) * x - 4.0);
    return 0.0;
}

Index clamp_index(long i, Index n) {
    if (i < 0) return 0;
    if (i >= n) return n - 1;
    return static_cast<Index>(i);
}

// One separable bicubic pass along columns; rows are handled by transposing.
Matrix bicubic_cols(const Matrix& img, Index out_cols) {
    const Index rows = img.rows(), cols = img.cols();
    const double scale = static_cast<double>(cols) / static_cast<double>(out_cols);
    Matrix out(rows, out_cols);
    for (Index c = 0; c < out_cols; ++c) {
        const double src = (static_cast<double>(c) + 0.5) * scale - 0.5;
        const long base = static_cast<long>(std::floor(src));
        double w[4];
        Index idx[4];
        for (int m = 0; m < 4; ++m) {
            const long j = base - 1 + m;
            w[m] = keys_cubic(src - static_cast<double>(j));
            idx[m] = clamp_index(j, cols);
        }
        for (Index r = 0; r < rows; ++r)
            out(r, c) = w[0] * img(r, idx[0]) + w[1] * img(r, idx[1]) + w[2] * img(r, idx[2]) +
                        w[3] * img(r, idx[3]);
    }
    return out;
}

Matrix bicubic_resize_to(const Matrix& img, Index out_rows, Index out_cols) {
    const Matrix horizontal = bicubic_cols(img, out_cols);
    const Matrix both = bicubic_cols(horizontal.transpose(), out_rows).transpose();
    return clamp_unit(both);
}

Index scaled_dim(Index dim, double factor, const char* what) {
    const long out = std::lround(static_cast<double>(dim) * factor);
    if (out < 1) throw UsageError(std::string(what) + ": output dimension would be < 1");
    return static_cast<Index>(out);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs = open_binary(images_path);
    const std::uint32_t img_magic = read_be32(imgs, images_path);
    if (img_magic != kIdxImageMagic)
        throw DataError(images_path + ": bad magic 0x" + std::to_string(img_magic) + ", expected " +
                        std::to_string(kIdxImageMagic) + " (idx3-ubyte)");
    const std::uint32_t count = read_be32(imgs, images_path);
    const std::uint32_t rows = read_be32(imgs, images_path);
    const std::uint32_t cols = read_be32(imgs, images_path);

    std::ifstream labs = open_binary(labels_path);
    const std::uint32_t lab_magic = read_be32(labs, labels_path);
    if (lab_magic != kIdxLabelMagic)
        throw DataError(labels_path + ": bad magic 0x" + std::to_string(lab_magic) + ", expected " +
                        std::to_string(kIdxLabelMagic) + " (idx1-ubyte)");
    const std::uint32_t lab_count = read_be32(labs, labels_path);
    if (lab_count != count)
        throw DataError("count mismatch: " + images_path + " has " + std::to_string(count) +
                        " items, " + labels_path + " has " + std::to_string(lab_count));

    LabeledDataset data;
    data.images.reserve(count);
    data.labels.reserve(count);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t n = 0; n < count; ++n) {
        if (!imgs.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw DataError(images_path + ": truncated at image " + std::to_string(n));
        Matrix img(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                img(i, j) = static_cast<double>(buf[i * cols + j]) / 255.0;
        data.images.push_back(std::move(img));
        const int c = labs.get();
        if (c == EOF) throw DataError(labels_path + ": truncated at label " + std::to_string(n));
        data.labels.push_back(c);
    }
    return data;
}

void save_idx(const LabeledDataset& data, const std::string& images_path,
              const std::string& labels_path) {
    if (data.images.size() != data.labels.size())
        throw UsageError("save_idx: image/label count mismatch");
    const Index rows = data.images.empty() ? 0 : data.images.front().rows();
    const Index cols = data.images.empty() ? 0 : data.images.front().cols();

    std::ofstream imgs(images_path, std::ios::binary | std::ios::trunc);
    if (!imgs) throw DataError("cannot open " + images_path);
    write_be32(imgs, kIdxImageMagic);
    write_be32(imgs, static_cast<std::uint32_t>(data.images.size()));
    write_be32(imgs, static_cast<std::uint32_t>(rows));
    write_be32(imgs, static_cast<std::uint32_t>(cols));
    for (const Matrix& img : data.images) {
        require_shape(img, rows, cols, "image");
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) imgs.put(static_cast<char>(to_byte(img(i, j))));
    }

    std::ofstream labs(labels_path, std::ios::binary | std::ios::trunc);
    if (!labs) throw DataError("cannot open " + labels_path);
    write_be32(labs, kIdxLabelMagic);
    write_be32(labs, static_cast<std::uint32_t>(data.labels.size()));
    for (int l : data.labels) labs.put(static_cast<char>(static_cast<unsigned char>(l)));
}

Matrix read_pgm(const std::string& path) {
    std::ifstream in = open_binary(path);
    const std::string magic = pnm_token(in, path);
    if (magic != "P5") throw DataError(path + ": expected P5 magic, got '" + magic + "'");
    const auto [rows, cols] = pnm_dims(in, path);
    Matrix img(rows, cols);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw DataError(path + ": truncated pixel data");
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) img(i, j) = buf[i * cols + j] / 255.0;
    return img;
}

void write_pgm(const Matrix& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path);
    out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
    for (Index i = 0; i < img.rows(); ++i)
        for (Index j = 0; j < img.cols(); ++j) out.put(static_cast<char>(to_byte(img(i, j))));
}

ImageRgb read_ppm(const std::string& path) {
    std::ifstream in = open_binary(path);
    const std::string magic = pnm_token(in, path);
    if (magic != "P6") throw DataError(path + ": expected P6 magic, got '" + magic + "'");
    const auto [rows, cols] = pnm_dims(in, path);
    ImageRgb img{Matrix(rows, cols), Matrix(rows, cols), Matrix(rows, cols)};
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols * 3);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw DataError(path + ": truncated pixel data");
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const std::size_t o = 3 * (i * cols + j);
            img.r(i, j) = buf[o] / 255.0;
            img.g(i, j) = buf[o + 1] / 255.0;
            img.b(i, j) = buf[o + 2] / 255.0;
        }
    return img;
}

void write_ppm(const ImageRgb& img, const std::string& path) {
    require_shape(img.g, img.r.rows(), img.r.cols(), "g");
    require_shape(img.b, img.r.rows(), img.r.cols(), "b");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path);
    out << "P6\n" << img.r.cols() << " " << img.r.rows() << "\n255\n";
    for (Index i = 0; i < img.r.rows(); ++i)
        for (Index j = 0; j < img.r.cols(); ++j) {
            out.put(static_cast<char>(to_byte(img.r(i, j))));
            out.put(static_cast<char>(to_byte(img.g(i, j))));
            out.put(static_cast<char>(to_byte(img.b(i, j))));
        }
}

bool is_ppm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    char m[2] = {0, 0};
    in.read(m, 2);
    return m[0] == 'P' && m[1] == '6';
}

std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    const auto base = std::filesystem::path(path).parent_path();
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
        line.erase(0, start);
        if (line.empty()) continue;
        const std::filesystem::path p(line);
        out.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
    return out;
}

Matrix binarize(const Matrix& img, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw UsageError("binarize: threshold must be in [0, 1]");
    return img.unaryExpr([threshold](double v) { return v > threshold ? 1.0 : 0.0; });
}

Matrix binarize_stochastic(const Matrix& img, Rng& rng) {
    if (!in_unit_interval(img)) throw DataError("binarize_stochastic: pixels outside [0, 1]");
    return sample_bernoulli(img, rng);
}

Matrix salt_pepper(const Matrix& img, double fraction, Rng& rng) {
    if (fraction < 0.0 || fraction > 1.0)
        throw UsageError("salt_pepper: fraction must be in [0, 1]");
    const std::size_t n = static_cast<std::size_t>(img.size());
    const std::size_t m = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t t = 0; t < m; ++t) std::swap(idx[t], idx[t + rng.index_below(n - t)]);
    Matrix out = img;
    const Index cols = img.cols();
    for (std::size_t t = 0; t < m; ++t) {
        const Index i = static_cast<Index>(idx[t]) / cols;
        const Index j = static_cast<Index>(idx[t]) % cols;
        out(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    return out;
}

std::array<Matrix, 4> extract_features(const Matrix& img) {
    const Index rows = img.rows(), cols = img.cols();
    auto px = [&](long i, long j) { return img(clamp_index(i, rows), clamp_index(j, cols)); };
    Matrix dx(rows, cols), dy(rows, cols), dxx(rows, cols), dyy(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            dx(i, j) = px(i, j + 1) - px(i, j - 1);
            dy(i, j) = px(i + 1, j) - px(i - 1, j);
            dxx(i, j) = px(i, j - 2) - 2.0 * px(i, j) + px(i, j + 2);
            dyy(i, j) = px(i - 2, j) - 2.0 * px(i, j) + px(i + 2, j);
        }
    return {dx, dy, dxx, dyy};
}

Matrix normalize_feature(const Matrix& raw, int feature_index) {
    if (feature_index < 0 || feature_index > 3)
        throw UsageError("normalize_feature: index must be in [0, 3]");
    const double span = feature_index < 2 ? 1.0 : 2.0;
    return clamp_unit(((raw.array() + span) / (2.0 * span)).matrix());
}

Matrix bicubic_resize(const Matrix& img, double factor) {
    if (!(factor > 0.0)) throw UsageError("bicubic_resize: factor must be > 0");
    return bicubic_resize_to(img, scaled_dim(img.rows(), factor, "bicubic_resize"),
                             scaled_dim(img.cols(), factor, "bicubic_resize"));
}

Matrix nearest_resize(const Matrix& img, double factor) {
    if (!(factor > 0.0)) throw UsageError("nearest_resize: factor must be > 0");
    const Index out_rows = scaled_dim(img.rows(), factor, "nearest_resize");
    const Index out_cols = scaled_dim(img.cols(), factor, "nearest_resize");
    Matrix out(out_rows, out_cols);
    for (Index r = 0; r < out_rows; ++r) {
        const Index i = clamp_index(
            std::lround((static_cast<double>(r) + 0.5) * img.rows() / out_rows - 0.5), img.rows());
        for (Index c = 0; c < out_cols; ++c) {
            const Index j = clamp_index(
                std::lround((static_cast<double>(c) + 0.5) * img.cols() / out_cols - 0.5),
                img.cols());
            out(r, c) = img(i, j);
        }
    }
    return out;
}

YCbCr ycbcr_split(const ImageRgb& rgb) {
    require_shape(rgb.g, rgb.r.rows(), rgb.r.cols(), "g");
    require_shape(rgb.b, rgb.r.rows(), rgb.r.cols(), "b");
    constexpr double kr = 0.299, kb = 0.114;
    const Matrix y = kr * rgb.r + (1.0 - kr - kb) * rgb.g + kb * rgb.b;
    YCbCr out;
    out.y = y;
    out.cb = 0.5 * ((rgb.b - y) / (1.0 - kb)).array() + 0.5;
    out.cr = 0.5 * ((rgb.r - y) / (1.0 - kr)).array() + 0.5;
    return out;
}

ImageRgb ycbcr_merge(const YCbCr& ycc) {
    constexpr double kr = 0.299, kb = 0.114;
    const double kg = 1.0 - kr - kb;
    const Matrix r = ycc.y + 2.0 * (1.0 - kr) * (ycc.cr.array() - 0.5).matrix();
    const Matrix b = ycc.y + 2.0 * (1.0 - kb) * (ycc.cb.array() - 0.5).matrix();
    const Matrix g = (ycc.y - kr * r - kb * b) / kg;
    return {clamp_unit(r), clamp_unit(g), clamp_unit(b)};
}

PatchSet sample_patches(const std::vector<Matrix>& corpus, Index patch, std::size_t patch_count,
                        double factor, Rng& rng) {
    if (corpus.empty()) throw UsageError("sample_patches: empty corpus");
    if (patch < 1) throw UsageError("sample_patches: patch must be >= 1");
    if (!(factor > 1.0)) throw UsageError("sample_patches: factor must be > 1");

    std::vector<std::array<Matrix, 4>> features(corpus.size());
    for (std::size_t n = 0; n < corpus.size(); ++n) {
        const Matrix& img = corpus[n];
        if (img.rows() < patch || img.cols() < patch)
            throw DataError("image " + std::to_string(n) + " is " + shape_str(img) +
                            ", smaller than patch " + std::to_string(patch));
        const Matrix low = bicubic_resize(img, 1.0 / factor);
        const Matrix up = bicubic_resize_to(low, img.rows(), img.cols());
        const auto raw = extract_features(up);
        for (int e = 0; e < 4; ++e) features[n][e] = normalize_feature(raw[e], e);
    }

    PatchSet out;
    out.samples.reserve(patch_count);
    out.origins.reserve(patch_count);
    for (std::size_t t = 0; t < patch_count; ++t) {
        const std::size_t n = rng.index_below(corpus.size());
        const Matrix& img = corpus[n];
        const Index r = static_cast<Index>(rng.index_below(static_cast<std::size_t>(img.rows() - patch + 1)));
        const Index c = static_cast<Index>(rng.index_below(static_cast<std::size_t>(img.cols() - patch + 1)));
        MultimodalSample s;
        s.x = img.block(r, c, patch, patch);
        for (int e = 0; e < 4; ++e) s.channels.push_back(features[n][e].block(r, c, patch, patch));
        out.samples.push_back(std::move(s));
        out.origins.push_back({n, r, c});
    }
    return out;
}

}  // namespace mvrbm
