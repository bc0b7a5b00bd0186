#pragma once
//
// File formats.
//
//   .rlm    "RLRA", u64 rows, u64 cols (little endian), column-major f64 LE
//   .sigma  ASCII, one value per line
//   .mtx    Matrix Market coordinate (real/integer/pattern, general/symmetric)
//   .pgm    P2 / P5, maxval up to 65535 (16-bit samples are big endian)
//

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "operator.hpp"
#include "single_pass.hpp"

namespace rlra {

namespace detail {

inline std::uint64_t load_u64_le(const unsigned char* b) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

inline void store_u64_le(std::uint64_t v, unsigned char* b) {
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline void decode_f64_le(const unsigned char* bytes, double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<double>(load_u64_le(bytes + 8 * i));
}

inline void encode_f64_le(const double* in, unsigned char* bytes, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) store_u64_le(std::bit_cast<std::uint64_t>(in[i]), bytes + 8 * i);
}

inline std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

constexpr char kMagic[4] = {'R', 'L', 'R', 'A'};
constexpr std::streamoff kHeaderBytes = 20;

struct RlraHeader {
    Index rows = 0;
    Index cols = 0;
};

inline RlraHeader read_rlra_header(std::istream& in, const std::string& path) {
    unsigned char head[kHeaderBytes];
    if (!in.read(reinterpret_cast<char*>(head), kHeaderBytes)) throw IoError("'" + path + "': truncated header");
    if (std::memcmp(head, kMagic, 4) != 0) throw IoError("'" + path + "': bad magic, expected RLRA");
    const std::uint64_t m = load_u64_le(head + 4);
    const std::uint64_t n = load_u64_le(head + 12);
    if (m > (1ull << 40) || n > (1ull << 40)) throw IoError("'" + path + "': implausible dimensions");
    return {static_cast<Index>(m), static_cast<Index>(n)};
}

}  // namespace detail

// ---- RLRA dense binary ----

inline void write_rlra(const std::string& path, const Matrix& a) {
    auto out = detail::open_out(path, std::ios::binary);
    unsigned char head[detail::kHeaderBytes];
    std::memcpy(head, detail::kMagic, 4);
    detail::store_u64_le(static_cast<std::uint64_t>(a.rows()), head + 4);
    detail::store_u64_le(static_cast<std::uint64_t>(a.cols()), head + 12);
    out.write(reinterpret_cast<const char*>(head), detail::kHeaderBytes);
    std::vector<unsigned char> buf(static_cast<std::size_t>(a.rows()) * 8);
    for (Index j = 0; j < a.cols(); ++j) {
        detail::encode_f64_le(a.col(j).data(), buf.data(), static_cast<std::size_t>(a.rows()));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("'" + path + "': write failed");
}

inline Matrix read_rlra(const std::string& path) {
    auto in = detail::open_in(path, std::ios::binary);
    const auto h = detail::read_rlra_header(in, path);
    Matrix a(h.rows, h.cols);
    std::vector<unsigned char> buf(static_cast<std::size_t>(a.size()) * 8);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw IoError("'" + path + "': truncated data");
    detail::decode_f64_le(buf.data(), a.data(), static_cast<std::size_t>(a.size()));
    return a;
}

/// Column stream straight from an RLRA file; only one panel is resident.
class RlraColumnStream {
public:
    explicit RlraColumnStream(const std::string& path) : path_(path), in_(detail::open_in(path, std::ios::binary)) {
        const auto h = detail::read_rlra_header(in_, path_);
        m_ = h.rows;
        n_ = h.cols;
    }

    Index rows() const { return m_; }
    Index cols() const { return n_; }

    std::optional<ColumnPanel> next(Index width) {
        if (pos_ >= n_) return std::nullopt;
        const Index c = std::min(width, n_ - pos_);
        buf_.resize(static_cast<std::size_t>(m_ * c) * 8);
        if (!in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size())))
            throw IoError("'" + path_ + "': truncated data");
        ColumnPanel panel{pos_, Matrix(m_, c)};
        detail::decode_f64_le(buf_.data(), panel.columns.data(), static_cast<std::size_t>(m_ * c));
        pos_ += c;
        return panel;
    }

private:
    std::string path_;
    std::ifstream in_;
    Index m_ = 0;
    Index n_ = 0;
    Index pos_ = 0;
    std::vector<unsigned char> buf_;
};

// ---- sigma sidecar ----

/// "t2.rlm" -> "t2.sigma"
inline std::string sigma_path_for(const std::string& matrix_path) {
    const auto slash = matrix_path.find_last_of('/');
    const auto dot = matrix_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return matrix_path + ".sigma";
    return matrix_path.substr(0, dot) + ".sigma";
}

inline void write_sigma(const std::string& path, const Vector& sigma) {
    auto out = detail::open_out(path);
    out << std::setprecision(17);
    for (Index i = 0; i < sigma.size(); ++i) out << sigma(i) << '\n';
    if (!out) throw IoError("'" + path + "': write failed");
}

inline Vector read_sigma(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<double> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) throw IoError("'" + path + "': bad value on line " + std::to_string(lineno));
        vals.push_back(v);
    }
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

// ---- Matrix Market ----

inline void write_matrix_market(const std::string& path, const SparseMatrix& a) {
    auto out = detail::open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    out << std::setprecision(17);
    for (Index j = 0; j < a.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) out << it.row() + 1 << ' ' << j + 1 << ' ' << it.value() << '\n';
    if (!out) throw IoError("'" + path + "': write failed");
}

inline SparseMatrix read_matrix_market(const std::string& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path + "': empty file");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    auto lower = [](std::string s) {
        for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return s;
    };
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
        throw IoError("'" + path + "': only Matrix Market coordinate matrices are supported");
    const bool pattern = field == "pattern";
    if (!pattern && field != "real" && field != "integer" && field != "double")
        throw IoError("'" + path + "': unsupported field '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    const bool skew = symmetry == "skew-symmetric";
    if (!symmetric && !skew && symmetry != "general")
        throw IoError("'" + path + "': unsupported symmetry '" + symmetry + "'");

    do {
        if (!std::getline(in, line)) throw IoError("'" + path + "': missing size line");
    } while (line.empty() || line[0] == '%');
    long long m = 0, n = 0, nnz = 0;
    if (!(std::istringstream(line) >> m >> n >> nnz) || m < 0 || n < 0 || nnz < 0)
        throw IoError("'" + path + "': bad size line");

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(symmetric || skew ? 2 * nnz : nnz));
    long long read = 0;
    while (read < nnz && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        long long i = 0, j = 0;
        double v = 1.0;
        if (!(ls >> i >> j) || (!pattern && !(ls >> v)))
            throw IoError("'" + path + "': bad entry " + std::to_string(read + 1));
        if (i < 1 || i > m || j < 1 || j > n) throw IoError("'" + path + "': entry index out of range");
        entries.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
        if ((symmetric || skew) && i != j)
            entries.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), skew ? -v : v);
        ++read;
    }
    if (read != nnz) throw IoError("'" + path + "': expected " + std::to_string(nnz) + " entries");
    SparseMatrix a(static_cast<Index>(m), static_cast<Index>(n));
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    return a;
}

/// Column stream over a sparse matrix; each panel is materialized dense.
class SparseColumnStream {
public:
    explicit SparseColumnStream(SparseMatrix a) : a_(std::move(a)) {}
    static SparseColumnStream from_file(const std::string& path) { return SparseColumnStream(read_matrix_market(path)); }

    Index rows() const { return a_.rows(); }
    Index cols() const { return a_.cols(); }

    std::optional<ColumnPanel> next(Index width) {
        if (pos_ >= a_.cols()) return std::nullopt;
        const Index c = std::min(width, a_.cols() - pos_);
        ColumnPanel panel{pos_, Matrix::Zero(a_.rows(), c)};
        for (Index j = 0; j < c; ++j)
            for (SparseMatrix::InnerIterator it(a_, pos_ + j); it; ++it) panel.columns(it.row(), j) = it.value();
        pos_ += c;
        return panel;
    }

private:
    SparseMatrix a_;
    Index pos_ = 0;
};

// ---- PGM ----

struct GrayImage {
    Matrix pixels;  // height x width
    int maxval = 255;
};

namespace detail {

inline std::string pgm_token(std::istream& in, const std::string& path) {
    std::string tok;
    char ch;
    while (in.get(ch)) {
        if (ch == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) break;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(ch);
    }
    if (tok.empty()) throw IoError("'" + path + "': malformed PGM header");
    return tok;
}

inline long pgm_number(std::istream& in, const std::string& path) {
    const std::string tok = pgm_token(in, path);
    std::size_t used = 0;
    long v = -1;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || v < 0) throw IoError("'" + path + "': malformed PGM header value '" + tok + "'");
    return v;
}

}  // namespace detail

inline GrayImage read_pgm(const std::string& path) {
    auto in = detail::open_in(path, std::ios::binary);
    const std::string magic = detail::pgm_token(in, path);
    if (magic != "P2" && magic != "P5") throw IoError("'" + path + "': not a PGM (P2/P5) file");
    const long w = detail::pgm_number(in, path);
    const long h = detail::pgm_number(in, path);
    const long maxval = detail::pgm_number(in, path);
    if (w < 1 || h < 1) throw IoError("'" + path + "': PGM has empty dimensions");
    if (maxval < 1 || maxval > 65535) throw IoError("'" + path + "': PGM maxval out of range");

    GrayImage img{Matrix(h, w), static_cast<int>(maxval)};
    if (magic == "P2") {
        for (long r = 0; r < h; ++r)
            for (long c = 0; c < w; ++c) {
                long v = -1;
                if (!(in >> v) || v < 0 || v > maxval) throw IoError("'" + path + "': bad or missing PGM sample");
                img.pixels(r, c) = static_cast<double>(v);
            }
        return img;
    }
    // the single whitespace after maxval was consumed by pgm_token
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w * h) * bytes_per);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw IoError("'" + path + "': truncated PGM raster");
    std::size_t at = 0;
    for (long r = 0; r < h; ++r)
        for (long c = 0; c < w; ++c) {
            unsigned v = buf[at++];
            if (bytes_per == 2) v = (v << 8) | buf[at++];
            if (v > static_cast<unsigned>(maxval)) throw IoError("'" + path + "': PGM sample exceeds maxval");
            img.pixels(r, c) = static_cast<double>(v);
        }
    return img;
}

/// Values are rounded and clamped to [0, maxval].
inline void write_pgm(const std::string& path, const GrayImage& img, bool binary = true) {
    if (img.maxval < 1 || img.maxval > 65535) throw IoError("'" + path + "': PGM maxval out of range");
    auto out = detail::open_out(path, std::ios::binary);
    const Index h = img.pixels.rows();
    const Index w = img.pixels.cols();
    out << (binary ? "P5" : "P2") << '\n' << w << ' ' << h << '\n' << img.maxval << '\n';
    auto sample = [&](Index r, Index c) {
        const double v = std::round(img.pixels(r, c));
        return static_cast<unsigned>(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, static_cast<double>(img.maxval)));
    };
    if (binary) {
        const bool wide = img.maxval > 255;
        std::vector<unsigned char> row;
        for (Index r = 0; r < h; ++r) {
            row.clear();
            for (Index c = 0; c < w; ++c) {
                const unsigned v = sample(r, c);
                if (wide) row.push_back(static_cast<unsigned char>(v >> 8));
                row.push_back(static_cast<unsigned char>(v & 0xFF));
            }
            out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
        }
    } else {
        for (Index r = 0; r < h; ++r) {
            for (Index c = 0; c < w; ++c) out << sample(r, c) << (c + 1 < w ? ' ' : '\n');
        }
    }
    if (!out) throw IoError("'" + path + "': write failed");
}

}  // namespace rlra
