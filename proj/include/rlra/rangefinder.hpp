#pragma once
//
// Power-iteration range finders with reorthogonalization.
//
//   power_basis_q          column basis Q of (A A^T)^p A Omega, QR every step
//   power_basis_lu_l       pivoted LU of A (A^T A)^p Omega, LU every step
//   power_basis_v          row basis V of (A^T A)^p Omega, LU inside, QR last
//   general_power_basis_v  row basis for any pass budget v >= 2
//
// Every product against A counts as one pass; each routine reports the
// number it issued.
//

#include <cstddef>
#include <limits>

#include "kernels.hpp"
#include "operator.hpp"

namespace rlra {

struct RangeBasis {
    Matrix V;  // orthonormal columns
    std::size_t passes_used = 0;
};

/// Sketch factored by pivoted LU: apply_row_perm(p, Y) == L * U.
struct SketchLU {
    Matrix L;
    Matrix U;
    Permutation p;
    std::size_t passes_used = 0;
};

/// Sketch-size parameters shared by the fixed-rank drivers.
struct PowerParams {
    Index k = 0;             // target rank
    Index oversample = 10;   // q; sketch width l = k + q
    Index power = 1;         // p, for the even-pass drivers
    Index passes = 3;        // v, for the PowerLU family

    Index width() const { return k + oversample; }
};

/// v = 2p + 2
constexpr Index passes_for_power(Index p) { return 2 * p + 2; }

/// Inverse of passes_for_power; only defined for even v >= 2.
inline Index power_for_passes(Index v) {
    if (v < 2 || v % 2 != 0) throw ShapeError("power_for_passes: pass count must be even and >= 2");
    return (v - 2) / 2;
}

/// Diagonal entries of a triangular factor below this fraction of the largest
/// one count as lost sketch directions.
inline constexpr double kCollapseRelTol =
    std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon();

namespace detail {

template <LinearOperator Op>
void check_width(const Op& a, Index l, const char* who) {
    if (l < 1 || l > std::min(a.rows(), a.cols()))
        throw ShapeError(std::string(who) + ": sketch width must satisfy 1 <= l <= min(m, n)");
}

inline Index resolved_width(const Matrix& r) {
    const Index d = std::min(r.rows(), r.cols());
    double top = 0.0;
    for (Index i = 0; i < d; ++i) top = std::max(top, std::abs(r(i, i)));
    if (!(top > 0.0)) return 0;
    Index kept = 0;
    for (Index i = 0; i < d; ++i)
        if (std::abs(r(i, i)) > kCollapseRelTol * top) ++kept;
    return kept;
}

/// Orthonormal basis of Range(y); throws RankCollapse if a column is lost.
inline Matrix orthonormalize(const Matrix& y) {
    if (!y.allFinite()) throw RankCollapse(static_cast<std::size_t>(y.cols()), 0);
    EconomyQR f = eqr(y);
    const Index kept = resolved_width(f.R);
    if (kept < y.cols()) throw RankCollapse(static_cast<std::size_t>(y.cols()), static_cast<std::size_t>(kept));
    return std::move(f.Q);
}

/// P^T L from a pivoted LU; same span as y, better conditioned.
inline Matrix lu_renormalize(const Matrix& y) {
    if (!y.allFinite()) throw RankCollapse(static_cast<std::size_t>(y.cols()), 0);
    return permuted_lower(y);
}

}  // namespace detail

template <LinearOperator Op>
RangeBasis power_basis_q(const Op& a, Index l, Index p, Seed seed) {
    detail::check_width(a, l, "power_basis_q");
    if (p < 0) throw ShapeError("power_basis_q: p must be >= 0");
    RangeBasis out;
    Matrix omega = gaussian(seed, a.cols(), l);
    Matrix q = detail::orthonormalize(a.apply(omega));
    ++out.passes_used;
    for (Index i = 0; i < p; ++i) {
        Matrix w = detail::orthonormalize(a.apply_transpose(q));
        q = detail::orthonormalize(a.apply(w));
        out.passes_used += 2;
    }
    out.V = std::move(q);
    return out;
}

template <LinearOperator Op>
SketchLU power_basis_lu_l(const Op& a, Index l, Index p, Seed seed) {
    detail::check_width(a, l, "power_basis_lu_l");
    if (p < 0) throw ShapeError("power_basis_lu_l: p must be >= 0");
    SketchLU out;
    Matrix omega = gaussian(seed, a.cols(), l);
    PivotedLU f = plu(a.apply(omega));
    ++out.passes_used;
    if (p > 0) {
        Matrix lower = scatter_rows(f.p, f.L);
        for (Index i = 1; i <= p; ++i) {
            lower = detail::lu_renormalize(a.apply_transpose(lower));
            ++out.passes_used;
            if (i == p) {
                f = plu(a.apply(lower));
            } else {
                lower = detail::lu_renormalize(a.apply(lower));
            }
            ++out.passes_used;
        }
    }
    if (!f.U.allFinite()) throw RankCollapse(static_cast<std::size_t>(l), 0);
    const Index kept = detail::resolved_width(f.U);
    if (kept < l) throw RankCollapse(static_cast<std::size_t>(l), static_cast<std::size_t>(kept));
    out.L = std::move(f.L);
    out.U = std::move(f.U);
    out.p = std::move(f.p);
    return out;
}

/// Y = A (A^T A)^p Omega formed as a raw product chain, no renormalization.
template <LinearOperator Op>
Matrix raw_power_sketch(const Op& a, Index l, Index p, Seed seed, std::size_t& passes) {
    detail::check_width(a, l, "raw_power_sketch");
    if (p < 0) throw ShapeError("raw_power_sketch: p must be >= 0");
    Matrix y = a.apply(gaussian(seed, a.cols(), l));
    ++passes;
    for (Index i = 0; i < p; ++i) {
        y = a.apply(a.apply_transpose(y));
        passes += 2;
    }
    return y;
}

template <LinearOperator Op>
RangeBasis general_power_basis_v(const Op& a, Index l, Index v, Seed seed) {
    if (v < 2) throw ShapeError("general_power_basis_v: pass budget v must be >= 2");
    detail::check_width(a, l, "general_power_basis_v");
    const Index rounds = (v - 1) / 2;

    RangeBasis out;
    Matrix basis;
    if (v % 2 == 0) {
        Matrix omega = gaussian(seed, a.rows(), l);
        Matrix x = a.apply_transpose(omega);
        ++out.passes_used;
        basis = (v > 2) ? detail::lu_renormalize(x) : detail::orthonormalize(x);
    } else {
        basis = gaussian(seed, a.cols(), l);
    }
    for (Index i = 1; i <= rounds; ++i) {
        basis = detail::lu_renormalize(a.apply(basis));
        Matrix x = a.apply_transpose(basis);
        out.passes_used += 2;
        basis = (i == rounds) ? detail::orthonormalize(x) : detail::lu_renormalize(x);
    }
    out.V = std::move(basis);
    return out;
}

/// Odd pass budget 2p+1 once the final A V is counted; requires p >= 1.
template <LinearOperator Op>
RangeBasis power_basis_v(const Op& a, Index l, Index p, Seed seed) {
    if (p < 1) throw ShapeError("power_basis_v: p must be >= 1 (no row basis exists for p = 0)");
    return general_power_basis_v(a, l, 2 * p + 1, seed);
}

}  // namespace rlra
