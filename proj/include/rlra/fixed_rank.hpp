#pragma once
//
// Fixed-rank drivers: randomized SVD, randomized LU (with and without
// reorthogonalized power iteration) and PowerLU.
//
// All LU drivers return A[p, :][:, q] ~= L * U with L m x k lower trapezoidal
// and U k x n upper trapezoidal.
//

#include <cmath>
#include <numbers>

#include "kernels.hpp"
#include "operator.hpp"
#include "rangefinder.hpp"

namespace rlra {

struct LowRankLU {
    Permutation p;  // rows, length m
    Permutation q;  // columns, length n
    Matrix L;       // m x k
    Matrix U;       // k x n
    Index rank = 0;
    std::size_t passes_used = 0;
};

struct LowRankSVD {
    Matrix U;  // m x r
    Vector S;  // r, nonincreasing
    Matrix V;  // n x r
    std::size_t passes_used = 0;
};

namespace detail {

inline void check_rank_params(Index m, Index n, Index k, Index oversample, const char* who) {
    if (k < 1) throw ShapeError(std::string(who) + ": rank k must be >= 1");
    if (oversample < 0) throw ShapeError(std::string(who) + ": oversampling must be >= 0");
    if (k + oversample > std::min(m, n))
        throw ShapeError(std::string(who) + ": k + oversampling exceeds min(m, n)");
}

/// Finish RandLU from the sketch factor P Y = L_y U_y: B = L_y^+ P A, then the
/// column-pivoted LU of B, realized as a row-pivoted LU of B^T.
template <LinearOperator Op>
LowRankLU finish_randlu(const Op& a, const Matrix& l_full, const Permutation& p, Index k,
                        std::size_t passes) {
    Matrix ly = l_full.leftCols(k);
    // coefficient matrix C^T with C = L_y^+ P, so that B = C A = (A^T C^T)^T
    Matrix ct = scatter_rows(p, pinv_transpose_apply(ly, Matrix::Identity(k, k)));
    Matrix bt = a.apply_transpose(ct);
    ++passes;

    PivotedLU f = plu(bt);  // B^T[q, :] = L' U'  =>  B[:, q] = U'^T L'^T
    LowRankLU out;
    out.p = p;
    out.q = std::move(f.p);
    out.L = ly * f.U.transpose();
    out.U = f.L.transpose();
    out.rank = k;
    out.passes_used = passes;
    return out;
}

}  // namespace detail

/// Given G = A * Vk (Vk orthonormal n x k), factor A Vk Vk^T exactly:
/// P G = L1 U1, B = U1 Vk^T, Q B^T = L2 U2, L = L1 U2^T, U = L2^T.
inline LowRankLU lu_from_row_basis(const Matrix& g, const Matrix& vk) {
    if (g.cols() != vk.cols()) throw ShapeError("lu_from_row_basis: G and V widths differ");
    const Index k = g.cols();
    if (k > g.rows() || k > vk.rows()) throw ShapeError("lu_from_row_basis: rank exceeds a dimension");
    PivotedLU first = plu(g);
    Matrix b_t = vk * first.U.transpose();  // B^T = V U1^T
    PivotedLU second = plu(b_t);
    LowRankLU out;
    out.p = std::move(first.p);
    out.q = std::move(second.p);
    out.L = first.L * second.U.transpose();
    out.U = second.L.transpose();
    out.rank = k;
    return out;
}

template <LinearOperator Op>
LowRankSVD randsvd(const Op& a, Index k, Index oversample, Index p, Seed seed) {
    detail::check_rank_params(a.rows(), a.cols(), k, oversample, "randsvd");
    const Index l = k + oversample;
    RangeBasis basis = power_basis_q(a, l, p, seed);
    Matrix b = a.apply_transpose(basis.V).transpose();  // Q^T A
    TruncatedSVD small = tsvd(b, l);
    LowRankSVD out;
    out.U = basis.V * small.U;
    out.S = std::move(small.S);
    out.V = std::move(small.V);
    out.passes_used = basis.passes_used + 1;
    return out;
}

/// Keep the leading k triplets.
inline LowRankSVD truncate(const LowRankSVD& s, Index k) {
    if (k < 1 || k > s.S.size()) throw ShapeError("truncate: k out of range");
    return LowRankSVD{s.U.leftCols(k), s.S.head(k), s.V.leftCols(k), s.passes_used};
}

inline Matrix reconstruct(const LowRankSVD& s) {
    return s.U * s.S.asDiagonal() * s.V.transpose();
}

template <LinearOperator Op>
LowRankLU randlu(const Op& a, Index k, Index oversample, Index p, Seed seed) {
    detail::check_rank_params(a.rows(), a.cols(), k, oversample, "randlu");
    SketchLU sk = power_basis_lu_l(a, k + oversample, p, seed);
    return detail::finish_randlu(a, sk.L, sk.p, k, sk.passes_used);
}

/// RandLU with the power iteration applied as a raw product chain.
template <LinearOperator Op>
LowRankLU randlu_noreorth(const Op& a, Index k, Index oversample, Index p, Seed seed) {
    detail::check_rank_params(a.rows(), a.cols(), k, oversample, "randlu_noreorth");
    std::size_t passes = 0;
    Matrix y = raw_power_sketch(a, k + oversample, p, seed, passes);
    PivotedLU f = plu(y);
    return detail::finish_randlu(a, f.L, f.p, k, passes);
}

template <LinearOperator Op>
LowRankLU powerlu(const Op& a, Index k, Index oversample, Index v, Seed seed) {
    detail::check_rank_params(a.rows(), a.cols(), k, oversample, "powerlu");
    RangeBasis basis = general_power_basis_v(a, k + oversample, v, seed);
    Matrix vk = basis.V.leftCols(k);
    Matrix g = a.apply(vk);
    LowRankLU out = lu_from_row_basis(g, vk);
    out.passes_used = basis.passes_used + 1;
    return out;
}

inline LowRankSVD randsvd(const Matrix& a, Index k, Index oversample, Index p, Seed seed) {
    return randsvd(DenseOperator(a), k, oversample, p, seed);
}
inline LowRankLU randlu(const Matrix& a, Index k, Index oversample, Index p, Seed seed) {
    return randlu(DenseOperator(a), k, oversample, p, seed);
}
inline LowRankLU randlu_noreorth(const Matrix& a, Index k, Index oversample, Index p, Seed seed) {
    return randlu_noreorth(DenseOperator(a), k, oversample, p, seed);
}
inline LowRankLU powerlu(const Matrix& a, Index k, Index oversample, Index v, Seed seed) {
    return powerlu(DenseOperator(a), k, oversample, v, seed);
}

/// P^T (L U) Q^T: entry (i, j) of L U lands at (p[i], q[j]).
inline Matrix reconstruct(const LowRankLU& f) {
    Matrix lu = f.L * f.U;
    Matrix rows = scatter_rows(f.p, lu);
    Matrix out(rows.rows(), rows.cols());
    for (Index j = 0; j < rows.cols(); ++j) out.col(f.q[j]) = rows.col(j);
    return out;
}

/// Largest principal angle between Range(X) and Range(Y), in radians.
/// Small angles are resolved through the sine of the projection residual,
/// where the cosine formulation loses precision.
inline double largest_principal_angle(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows()) throw ShapeError("largest_principal_angle: row mismatch");
    Matrix qx = eqr(x).Q;
    Matrix qy = eqr(y).Q;
    Matrix c = qx.transpose() * qy;
    Eigen::JacobiSVD<Matrix> svd(c);
    const double smin = svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
    const double by_cos = std::acos(std::clamp(smin, -1.0, 1.0));
    if (by_cos >= std::numbers::pi / 4) return by_cos;
    Matrix residual = qy - qx * c;
    return std::asin(std::clamp(spec_norm(residual), 0.0, 1.0));
}

/// Largest principal angle between Range(P1^T L1) and Range(P2^T L2).
inline double range_agreement(const LowRankLU& f1, const LowRankLU& f2) {
    if (f1.L.rows() != f2.L.rows()) throw ShapeError("range_agreement: row counts differ");
    if (f1.rank != f2.rank) throw ShapeError("range_agreement: ranks differ");
    return largest_principal_angle(scatter_rows(f1.p, f1.L), scatter_rows(f2.p, f2.L));
}

}  // namespace rlra
