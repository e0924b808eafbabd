#include "mvrbm/persistence.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace mvrbm {

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'V', 'R', 'B', 'M', '\0', 'v', '1'};

std::uint64_t crc_table(int i) {
    static const auto table = [] {
        std::array<std::uint64_t, 256> t{};
        constexpr std::uint64_t poly = 0xC96C5795D7870F42ull;
        for (int n = 0; n < 256; ++n) {
            std::uint64_t c = static_cast<std::uint64_t>(n);
            for (int b = 0; b < 8; ++b) c = (c & 1) ? (c >> 1) ^ poly : c >> 1;
            t[static_cast<std::size_t>(n)] = c;
        }
        return t;
    }();
    return table[static_cast<std::size_t>(i)];
}

class ArtifactWriter {
  public:
    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void put_f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
    void put_matrix(const Matrix& m) {  // row-major
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) put_f64(m(i, j));
    }
    void put_vector(const Vector& v) {
        for (Index i = 0; i < v.size(); ++i) put_f64(v(i));
    }

    void write(const std::string& path) {
        const std::uint64_t crc = crc64(bytes_.data(), bytes_.size());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + path);
        out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
        for (int i = 0; i < 8; ++i) out.put(static_cast<char>((crc >> (8 * i)) & 0xff));
        if (!out) throw DataError("write failed for " + path);
    }

    ArtifactWriter() { bytes_.assign(kMagic.begin(), kMagic.end()); }

  private:
    std::vector<char> bytes_;
};

class ArtifactReader {
  public:
    explicit ArtifactReader(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open " + path);
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        if (bytes_.size() < kMagic.size() + 4 + 8) throw DataError(path + ": file too short");
        if (!std::equal(kMagic.begin(), kMagic.end(), bytes_.begin()))
            throw DataError(path + ": bad magic (not a model artifact or unknown version)");
        const std::size_t body = bytes_.size() - 8;
        std::uint64_t stored = 0;
        for (int i = 0; i < 8; ++i)
            stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[body + i]))
                      << (8 * i);
        if (crc64(bytes_.data(), body) != stored) throw DataError(path + ": checksum mismatch");
        end_ = body;
        pos_ = kMagic.size();
    }

    std::uint32_t get_u32() {
        if (pos_ + 4 > end_) throw DataError(path_ + ": truncated header");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    double get_f64() {
        if (pos_ + 8 > end_) throw DataError(path_ + ": payload shorter than declared shapes");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    Matrix get_matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) m(i, j) = get_f64();
        return m;
    }

    Vector get_vector(Index n) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) v(i) = get_f64();
        return v;
    }

    void finish() const {
        if (pos_ != end_)
            throw DataError(path_ + ": payload longer than declared shapes (" +
                            std::to_string(end_ - pos_) + " trailing bytes)");
    }

  private:
    std::string path_;
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
};

Index dim(std::uint32_t v, const char* what) {
    if (v == 0 || v > (1u << 24)) throw DataError(std::string("unreasonable ") + what);
    return static_cast<Index>(v);
}

}  // namespace

std::uint64_t crc64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t crc = ~0ull;
    for (std::size_t i = 0; i < size; ++i)
        crc = crc_table(static_cast<int>((crc ^ p[i]) & 0xff)) ^ (crc >> 8);
    return ~crc;
}

void save_model(const MvrbmParams& params, const std::string& path) {
    params.validate();
    ArtifactWriter w;
    w.put_u32(static_cast<std::uint32_t>(ModelKind::mvrbm));
    w.put_u32(static_cast<std::uint32_t>(params.visible_rows()));
    w.put_u32(static_cast<std::uint32_t>(params.visible_cols()));
    w.put_u32(static_cast<std::uint32_t>(params.hidden_rows()));
    w.put_u32(static_cast<std::uint32_t>(params.hidden_cols()));
    w.put_matrix(params.U);
    w.put_matrix(params.V);
    w.put_matrix(params.B);
    w.put_matrix(params.C);
    w.write(path);
}

void save_model(const RbmParams& params, const std::string& path) {
    params.validate();
    ArtifactWriter w;
    w.put_u32(static_cast<std::uint32_t>(ModelKind::rbm));
    w.put_u32(static_cast<std::uint32_t>(params.visible_dim()));
    w.put_u32(static_cast<std::uint32_t>(params.hidden_dim()));
    w.put_matrix(params.W);
    w.put_vector(params.b);
    w.put_vector(params.c);
    w.write(path);
}

void save_model(const MultimodalParams& params, const std::string& path) {
    params.validate();
    ArtifactWriter w;
    w.put_u32(static_cast<std::uint32_t>(ModelKind::mmvrbm));
    w.put_u32(static_cast<std::uint32_t>(params.base.visible_rows()));
    w.put_u32(static_cast<std::uint32_t>(params.base.visible_cols()));
    w.put_u32(static_cast<std::uint32_t>(params.hidden_rows()));
    w.put_u32(static_cast<std::uint32_t>(params.hidden_cols()));
    w.put_u32(static_cast<std::uint32_t>(params.channels.size()));
    for (const auto& ch : params.channels) {
        w.put_u32(static_cast<std::uint32_t>(ch.A.rows()));
        w.put_u32(static_cast<std::uint32_t>(ch.A.cols()));
    }
    w.put_matrix(params.base.U);
    w.put_matrix(params.base.V);
    w.put_matrix(params.base.B);
    w.put_matrix(params.base.C);
    for (const auto& ch : params.channels) {
        w.put_matrix(ch.Q);
        w.put_matrix(ch.R);
        w.put_matrix(ch.A);
    }
    w.write(path);
}

LoadedModel load_model(const std::string& path) {
    ArtifactReader r(path);
    const std::uint32_t kind = r.get_u32();
    if (kind == static_cast<std::uint32_t>(ModelKind::mvrbm)) {
        const Index i = dim(r.get_u32(), "visible rows"), j = dim(r.get_u32(), "visible cols");
        const Index k = dim(r.get_u32(), "hidden rows"), l = dim(r.get_u32(), "hidden cols");
        MvrbmParams p;
        p.U = r.get_matrix(k, i);
        p.V = r.get_matrix(l, j);
        p.B = r.get_matrix(i, j);
        p.C = r.get_matrix(k, l);
        r.finish();
        return p;
    }
    if (kind == static_cast<std::uint32_t>(ModelKind::rbm)) {
        const Index v = dim(r.get_u32(), "visible dim"), h = dim(r.get_u32(), "hidden dim");
        RbmParams p;
        p.W = r.get_matrix(v, h);
        p.b = r.get_vector(v);
        p.c = r.get_vector(h);
        r.finish();
        return p;
    }
    if (kind == static_cast<std::uint32_t>(ModelKind::mmvrbm)) {
        const Index i = dim(r.get_u32(), "visible rows"), j = dim(r.get_u32(), "visible cols");
        const Index k = dim(r.get_u32(), "hidden rows"), l = dim(r.get_u32(), "hidden cols");
        const std::uint32_t n_ch = r.get_u32();
        if (n_ch > 256) throw DataError(path + ": unreasonable channel count");
        std::vector<std::pair<Index, Index>> dims;
        for (std::uint32_t e = 0; e < n_ch; ++e) {
            const Index h = dim(r.get_u32(), "channel rows"), w = dim(r.get_u32(), "channel cols");
            dims.emplace_back(h, w);
        }
        MultimodalParams p;
        p.base.U = r.get_matrix(k, i);
        p.base.V = r.get_matrix(l, j);
        p.base.B = r.get_matrix(i, j);
        p.base.C = r.get_matrix(k, l);
        for (const auto& [h, w] : dims)
            p.channels.push_back({r.get_matrix(k, h), r.get_matrix(l, w), r.get_matrix(h, w)});
        r.finish();
        return p;
    }
    throw DataError(path + ": unknown model kind " + std::to_string(kind));
}

ModelKind loaded_kind(const LoadedModel& model) {
    return static_cast<ModelKind>(model.index());
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw DataError(path + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

}  // namespace mvrbm
