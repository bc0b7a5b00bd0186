#pragma once
//
// Deterministic dense kernels: partial-pivot LU, economy QR, pseudoinverse
// application, orthogonal projection and a truncated SVD used as the
// optimality oracle.
//

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "matrix.hpp"

namespace rlra {

/// Economy partial-pivot LU: apply_row_perm(p, A) == L * U.
/// L is m x r unit lower trapezoidal, U is r x n upper trapezoidal, r = min(m, n).
struct PivotedLU {
    Matrix L;
    Matrix U;
    Permutation p;
};

/// Economy QR: A == Q * R with Q m x r orthonormal, R r x n upper trapezoidal.
struct EconomyQR {
    Matrix Q;
    Matrix R;
};

/// Leading k singular triplets, S nonincreasing.
struct TruncatedSVD {
    Matrix U;
    Vector S;
    Matrix V;
};

/// Pivot magnitude (relative to the column's original max) at or below which a
/// pivot is treated as zero.
inline constexpr double kZeroPivotRelTol = 1e-14;

/// Pseudoinverse inputs whose |R_ii| falls below this fraction of ||L||_F are rejected.
inline constexpr double kPinvRankTol = 1e-12;

inline PivotedLU plu(const Matrix& a) {
    const Index m = a.rows();
    const Index n = a.cols();
    const Index r = std::min(m, n);

    Matrix w = a;
    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), Index{0});

    for (Index j = 0; j < r; ++j) {
        const double col_max = a.col(j).cwiseAbs().maxCoeff();

        Index piv_off = 0;
        const double piv_abs = w.col(j).tail(m - j).cwiseAbs().maxCoeff(&piv_off);
        const Index piv = j + piv_off;

        if (piv_abs <= kZeroPivotRelTol * col_max) {
            // zero column: keep row order, L column stays zero below the diagonal
            w.col(j).tail(m - j - 1).setZero();
            continue;
        }
        if (piv != j) {
            w.row(j).swap(w.row(piv));
            std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(piv)]);
        }
        const Index below = m - j - 1;
        if (below == 0) continue;
        w.col(j).tail(below) /= w(j, j);
        const Index right = n - j - 1;
        if (right > 0)
            w.bottomRightCorner(below, right).noalias() -=
                w.col(j).tail(below) * w.row(j).tail(right);
    }

    PivotedLU out;
    out.L = Matrix::Identity(m, r);
    out.L.triangularView<Eigen::StrictlyLower>() = w.leftCols(r).triangularView<Eigen::StrictlyLower>();
    out.U = w.topRows(r).triangularView<Eigen::Upper>();
    out.p = Permutation(std::move(perm));
    return out;
}

/// L factor with the row permutation folded back in (P^T L), so its span
/// equals the span of the factored matrix. Used for interior renormalization.
inline Matrix permuted_lower(const Matrix& a) {
    PivotedLU f = plu(a);
    return scatter_rows(f.p, f.L);
}

inline EconomyQR eqr(const Matrix& a) {
    const Index m = a.rows();
    const Index n = a.cols();
    const Index r = std::min(m, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    EconomyQR out;
    out.Q = qr.householderQ() * Matrix::Identity(m, r);
    out.R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    return out;
}

namespace detail {

inline EconomyQR checked_qr_for_pinv(const Matrix& l) {
    if (l.rows() < l.cols()) throw ShapeError("pseudoinverse: L must have at least as many rows as columns");
    EconomyQR f = eqr(l);
    const double floor = kPinvRankTol * l.norm();
    for (Index i = 0; i < f.R.rows(); ++i)
        if (!(std::abs(f.R(i, i)) > floor))
            throw IllPosedPseudoinverse("pseudoinverse: matrix is numerically rank-deficient (|R_" +
                                        std::to_string(i) + "," + std::to_string(i) + "| below threshold)");
    return f;
}

}  // namespace detail

/// L^+ M for full-column-rank L, via QR least squares (R X = Q^T M).
inline Matrix pinv_apply(const Matrix& l, const Matrix& m) {
    if (l.rows() != m.rows()) throw ShapeError("pinv_apply: row mismatch");
    EconomyQR f = detail::checked_qr_for_pinv(l);
    Matrix rhs = f.Q.transpose() * m;
    return f.R.triangularView<Eigen::Upper>().solve(rhs);
}

/// (L^+)^T M = Q R^{-T} M for full-column-rank L; M has L.cols() rows.
inline Matrix pinv_transpose_apply(const Matrix& l, const Matrix& m) {
    if (l.cols() != m.rows()) throw ShapeError("pinv_transpose_apply: shape mismatch");
    EconomyQR f = detail::checked_qr_for_pinv(l);
    Matrix y = f.R.transpose().triangularView<Eigen::Lower>().solve(m);
    return f.Q * y;
}

/// Q (Q^T M) for Q with orthonormal columns.
inline Matrix projector_apply(const Matrix& q, const Matrix& m) {
    if (q.rows() != m.rows()) throw ShapeError("projector_apply: row mismatch");
    Matrix coeffs = q.transpose() * m;
    return q * coeffs;
}

inline TruncatedSVD tsvd(const Matrix& a, Index k) {
    const Index r = std::min(a.rows(), a.cols());
    if (k < 1 || k > r) throw ShapeError("tsvd: k must satisfy 1 <= k <= min(m, n)");
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return TruncatedSVD{svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

inline Matrix reconstruct(const TruncatedSVD& s) {
    return s.U * s.S.asDiagonal() * s.V.transpose();
}

inline double spec_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return tsvd(a, 1).S(0);
}

}  // namespace rlra
