#pragma once
//
// Single-pass randomized LU over a column stream.
//
// One sweep over the columns of A computes both sketches:
//     G(i, :) = A(:, i)^T Omega        (Omega is m x k)
//     H      += A(:, i) G(i, :)
// so G = A^T Omega and H = A G. Afterwards A is never touched again.
//

#include <optional>
#include <span>

#include <Eigen/Eigenvalues>

#include "fixed_rank.hpp"
#include "kernels.hpp"

namespace rlra {

/// A run of consecutive columns starting at `first`.
struct ColumnPanel {
    Index first = 0;
    Matrix columns;  // m x c
};

template <class S>
concept ColumnStream = requires(S& s, Index width) {
    { s.rows() } -> std::convertible_to<Index>;
    { s.cols() } -> std::convertible_to<Index>;
    { s.next(width) } -> std::same_as<std::optional<ColumnPanel>>;
};

inline constexpr Index kDefaultPanelWidth = 256;

/// Streams the columns of an in-memory matrix.
class DenseColumnStream {
public:
    explicit DenseColumnStream(const Matrix& a) : a_(&a) {}

    Index rows() const { return a_->rows(); }
    Index cols() const { return a_->cols(); }

    std::optional<ColumnPanel> next(Index width) {
        if (pos_ >= a_->cols()) return std::nullopt;
        const Index c = std::min(width, a_->cols() - pos_);
        ColumnPanel panel{pos_, a_->middleCols(pos_, c)};
        pos_ += c;
        return panel;
    }

private:
    const Matrix* a_;
    Index pos_ = 0;
};

/// Presents a row-major m x n buffer as a column stream of its transpose:
/// row i of A arrives as column i of A^T.
class TransposedRowStream {
public:
    TransposedRowStream(std::span<const double> row_major, Index m, Index n)
        : data_(row_major), m_(m), n_(n) {
        if (static_cast<Index>(row_major.size()) != m * n)
            throw ShapeError("TransposedRowStream: buffer length != m * n");
    }

    Index rows() const { return n_; }
    Index cols() const { return m_; }

    std::optional<ColumnPanel> next(Index width) {
        if (pos_ >= m_) return std::nullopt;
        const Index c = std::min(width, m_ - pos_);
        ColumnPanel panel{pos_, Matrix(n_, c)};
        for (Index j = 0; j < c; ++j)
            panel.columns.col(j) = Eigen::Map<const Vector>(data_.data() + (pos_ + j) * n_, n_);
        pos_ += c;
        return panel;
    }

private:
    std::span<const double> data_;
    Index m_;
    Index n_;
    Index pos_ = 0;
};

/// Counts pulls and delivered columns of a wrapped stream.
template <ColumnStream Inner>
class CountingStream {
public:
    explicit CountingStream(Inner& inner) : inner_(&inner) {}

    Index rows() const { return inner_->rows(); }
    Index cols() const { return inner_->cols(); }

    std::optional<ColumnPanel> next(Index width) {
        ++pulls_;
        auto panel = inner_->next(width);
        if (panel) columns_ += static_cast<std::size_t>(panel->columns.cols());
        return panel;
    }

    std::size_t column_count() const { return columns_; }
    std::size_t pull_count() const { return pulls_; }

private:
    Inner* inner_;
    std::size_t columns_ = 0;
    std::size_t pulls_ = 0;
};

struct SketchPair {
    Matrix G;  // n x k, A^T Omega
    Matrix H;  // m x k, A G
};

template <ColumnStream S>
SketchPair stream_sketch(S& stream, Index k, Seed seed, Index panel_width = kDefaultPanelWidth) {
    const Index m = stream.rows();
    const Index n = stream.cols();
    if (k < 1 || k > std::min(m, n)) throw ShapeError("stream_sketch: k must satisfy 1 <= k <= min(m, n)");
    if (panel_width < 1) throw ShapeError("stream_sketch: panel width must be >= 1");

    const Matrix omega = gaussian(seed, m, k);
    SketchPair out{Matrix(n, k), Matrix::Zero(m, k)};
    Index seen = 0;
    while (auto panel = stream.next(panel_width)) {
        const Index c = panel->columns.cols();
        if (panel->columns.rows() != m || panel->first != seen || seen + c > n)
            throw ShapeError("stream_sketch: stream delivered columns out of order or of wrong length");
        Matrix g_rows = panel->columns.transpose() * omega;  // c x k
        out.H.noalias() += panel->columns * g_rows;
        out.G.middleRows(seen, c) = std::move(g_rows);
        seen += c;
    }
    if (seen != n) throw ShapeError("stream_sketch: stream length mismatch");
    return out;
}

/// Factor from the two sketches: P H = L1 U1, Q (G^+)^T U1^T = L2 U2,
/// L = L1 U2^T, U = L2^T. With oversampling the factors are cut to k.
inline LowRankLU lu_from_sketches(const SketchPair& sk, Index k) {
    PivotedLU first = plu(sk.H);
    Matrix tall = pinv_transpose_apply(sk.G, first.U.transpose());  // n x l
    PivotedLU second = plu(tall);
    LowRankLU out;
    out.p = std::move(first.p);
    out.q = std::move(second.p);
    out.L = (first.L * second.U.transpose()).leftCols(k);
    out.U = second.L.transpose().topRows(k);
    out.rank = k;
    out.passes_used = 1;
    return out;
}

template <ColumnStream S>
LowRankLU single_pass_lu(S& stream, Index k, Seed seed, Index oversample = 0,
                         Index panel_width = kDefaultPanelWidth) {
    if (oversample < 0) throw ShapeError("single_pass_lu: oversampling must be >= 0");
    SketchPair sk = stream_sketch(stream, k + oversample, seed, panel_width);
    return lu_from_sketches(sk, k);
}

/// Single pass over a row-major buffer: factor A^T from its column stream,
/// then transpose the contract back onto A.
inline LowRankLU single_pass_lu_row_major(std::span<const double> row_major, Index m, Index n, Index k,
                                          Seed seed, Index panel_width = kDefaultPanelWidth) {
    TransposedRowStream stream(row_major, m, n);
    LowRankLU t = single_pass_lu(stream, k, seed, 0, panel_width);
    LowRankLU out;
    out.p = std::move(t.q);
    out.q = std::move(t.p);
    out.L = t.U.transpose();
    out.U = t.L.transpose();
    out.rank = t.rank;
    out.passes_used = t.passes_used;
    return out;
}

/// Two-sided single-pass baseline: Y = A Omega, Yt = A^T Psi, orthonormal Q, Qt,
/// and A ~= Q B Qt^T with B the joint least-squares solution of
///     B (Qt^T Omega) = Q^T Y   and   B^T (Q^T Psi) = Qt^T Yt.
inline LowRankSVD single_pass_baseline_2011(const Matrix& a, Index k, Seed seed) {
    const Index m = a.rows();
    const Index n = a.cols();
    if (k < 1 || k > std::min(m, n)) throw ShapeError("single_pass_baseline_2011: k must satisfy 1 <= k <= min(m, n)");
    const Matrix omega = gaussian(derive(seed, 0), n, k);
    const Matrix psi = gaussian(derive(seed, 1), m, k);
    const Matrix y = a * omega;
    const Matrix yt = a.transpose() * psi;
    const Matrix q = eqr(y).Q;
    const Matrix qt = eqr(yt).Q;

    // min ||B X - C1||^2 + ||Z^T B - C2^T||^2  =>  B (X X^T) + (Z Z^T) B = C1 X^T + Z C2^T
    const Matrix x = qt.transpose() * omega;
    const Matrix z = q.transpose() * psi;
    const Matrix c1 = q.transpose() * y;
    const Matrix c2 = qt.transpose() * yt;
    Eigen::SelfAdjointEigenSolver<Matrix> right(x * x.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> left(z * z.transpose());
    const Matrix rhs = left.eigenvectors().transpose() * (c1 * x.transpose() + z * c2.transpose()) *
                       right.eigenvectors();
    const double scale = right.eigenvalues().maxCoeff() + left.eigenvalues().maxCoeff();
    Matrix b_rot(k, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < k; ++i) {
            const double d = left.eigenvalues()(i) + right.eigenvalues()(j);
            if (!(d > 1e-14 * scale)) throw IllPosedPseudoinverse("single_pass_baseline_2011: singular sketch system");
            b_rot(i, j) = rhs(i, j) / d;
        }
    const Matrix b = left.eigenvectors() * b_rot * right.eigenvectors().transpose();

    TruncatedSVD small = tsvd(b, k);
    return LowRankSVD{q * small.U, small.S, qt * small.V, 1};
}

}  // namespace rlra
