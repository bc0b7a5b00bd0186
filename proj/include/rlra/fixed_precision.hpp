#pragma once
//
// Fixed-precision factorization: blocked adaptive rank determination that
// never updates A, per-column rank refinement, and the PowerLU_FP driver.
//
// With V orthonormal and G = A V, the residual energy after j blocks is
//     ||A - A V_{1:j} V_{1:j}^T||_F^2 = ||A||_F^2 - sum_{i<=j} ||G_i||_F^2,
// so the stopping rule is a scan over the column energies of G.
//

#include <utility>
#include <vector>

#include "fixed_rank.hpp"
#include "rangefinder.hpp"

namespace rlra {

struct PrecisionParams {
    double eps = 1e-2;  // relative Frobenius tolerance
    Index block = 10;   // b
    Index width = 0;    // l, a multiple of b
    Index passes = 4;   // v >= 2
};

struct AdaptiveOutcome {
    Index rank = 0;
    Matrix V;  // n x rank, orthonormal
    Matrix G;  // m x rank, G = A V
    double residual_energy = 0.0;
    bool converged = false;
    std::size_t passes_used = 0;
};

/// Raised by powerlu_fp when l columns are not enough; carries the partial outcome.
class NotConverged : public Error {
public:
    explicit NotConverged(AdaptiveOutcome partial)
        : Error("fixed-precision tolerance not reached within the sketch width"),
          partial_(std::move(partial)) {}
    const AdaptiveOutcome& partial() const noexcept { return partial_; }

private:
    AdaptiveOutcome partial_;
};

struct RankRefinement {
    Index rank = 0;
    double energy = 0.0;
};

/// Largest multiple of b not exceeding min(m, n).
inline Index max_width(Index m, Index n, Index b) { return (std::min(m, n) / b) * b; }

/// min(50 b, max_width)
inline Index default_width(Index m, Index n, Index b) { return std::min(50 * b, max_width(m, n, b)); }

inline void validate(const PrecisionParams& pp, Index m, Index n) {
    if (!(pp.eps > 0.0 && pp.eps <= 1.0)) throw ShapeError("precision params: eps must lie in (0, 1]");
    if (pp.block < 1) throw ShapeError("precision params: block size must be >= 1");
    if (pp.width < pp.block || pp.width % pp.block != 0)
        throw ShapeError("precision params: sketch width must be a positive multiple of the block size");
    if (pp.width > std::min(m, n)) throw ShapeError("precision params: sketch width exceeds min(m, n)");
    if (pp.passes < 2) throw ShapeError("precision params: pass budget must be >= 2");
}

/// Walk the stopping block column by column. `block_start` is the 1-based
/// index of the block's first column; the returned rank is the 1-based index
/// of the column at which E first drops to acc (or the block end).
inline RankRefinement refine_rank(const Matrix& g, double energy_in, double acc, Index block_start, Index b) {
    if (block_start < 1 || b < 1) throw ShapeError("refine_rank: block_start and b must be >= 1");
    double e = energy_in;
    const Index stop = std::min(block_start - 1 + b, g.cols());
    for (Index c = block_start - 1; c < stop; ++c) {
        e -= g.col(c).squaredNorm();
        if (e <= acc) return {c + 1, e};
    }
    return {stop, e};
}

template <LinearOperator Op>
AdaptiveOutcome adaptive_rank(const Op& a, const PrecisionParams& pp, Seed seed) {
    validate(pp, a.rows(), a.cols());
    const double total = a.squared_norm();
    const double acc = pp.eps * pp.eps * total;

    RangeBasis basis = general_power_basis_v(a, pp.width, pp.passes, seed);
    Matrix g = a.apply(basis.V);

    AdaptiveOutcome out;
    out.passes_used = basis.passes_used + 1;

    double e = total;
    const Index blocks = pp.width / pp.block;
    for (Index i = 0; i < blocks; ++i) {
        const Index first = i * pp.block;
        const double block_energy = g.middleCols(first, pp.block).squaredNorm();
        if (e - block_energy <= acc) {
            RankRefinement r = refine_rank(g, e, acc, first + 1, pp.block);
            out.rank = r.rank;
            out.residual_energy = std::max(r.energy, 0.0);
            out.converged = true;
            out.V = basis.V.leftCols(r.rank);
            out.G = g.leftCols(r.rank);
            return out;
        }
        e -= block_energy;
    }
    out.rank = pp.width;
    out.residual_energy = std::max(e, 0.0);
    out.converged = false;
    out.V = std::move(basis.V);
    out.G = std::move(g);
    return out;
}

struct FixedPrecisionResult {
    LowRankLU factors;
    AdaptiveOutcome outcome;
};

template <LinearOperator Op>
FixedPrecisionResult powerlu_fp(const Op& a, const PrecisionParams& pp, Seed seed) {
    AdaptiveOutcome outcome = adaptive_rank(a, pp, seed);
    if (!outcome.converged) throw NotConverged(std::move(outcome));
    LowRankLU f = lu_from_row_basis(outcome.G, outcome.V);
    f.passes_used = outcome.passes_used;
    return FixedPrecisionResult{std::move(f), std::move(outcome)};
}

struct RestartPlan {
    PrecisionParams params;
    Seed seed;
};

/// Double l (capped at the largest multiple of b within min(m, n)) and draw a
/// fresh seed. The caller reruns on the original A.
inline RestartPlan restart_policy(const AdaptiveOutcome& prev, const PrecisionParams& pp, Seed seed) {
    if (prev.converged) throw ShapeError("restart_policy: outcome already converged");
    const Index cap = max_width(prev.G.rows(), prev.V.rows(), pp.block);
    if (pp.width >= cap) throw Unsatisfiable("restart_policy: sketch width already at min(m, n)");
    RestartPlan plan{pp, derive(seed, 0x5EED)};
    plan.params.width = std::min(2 * pp.width, cap);
    return plan;
}

/// powerlu_fp with restarts until convergence; throws Unsatisfiable at the cap.
template <LinearOperator Op>
FixedPrecisionResult powerlu_fp_restarting(const Op& a, PrecisionParams pp, Seed seed,
                                           std::size_t* restarts = nullptr) {
    std::size_t count = 0;
    for (;;) {
        try {
            FixedPrecisionResult r = powerlu_fp(a, pp, seed);
            if (restarts) *restarts = count;
            return r;
        } catch (const NotConverged& nc) {
            RestartPlan plan = restart_policy(nc.partial(), pp, seed);
            pp = plan.params;
            seed = plan.seed;
            ++count;
        }
    }
}

inline AdaptiveOutcome adaptive_rank(const Matrix& a, const PrecisionParams& pp, Seed seed) {
    return adaptive_rank(DenseOperator(a), pp, seed);
}
inline FixedPrecisionResult powerlu_fp(const Matrix& a, const PrecisionParams& pp, Seed seed) {
    return powerlu_fp(DenseOperator(a), pp, seed);
}

struct IndicatorPair {
    double lhs = 0.0;  // ||A - (A V) V^T||_F^2
    double rhs = 0.0;  // ||A||_F^2 - ||A V||_F^2
};

/// Both sides of the error-indicator identity for orthonormal V.
inline IndicatorPair error_indicator_check(const Matrix& a, const Matrix& v) {
    if (v.rows() != a.cols()) throw ShapeError("error_indicator_check: V must have n rows");
    const double defect = (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-8) throw ShapeError("error_indicator_check: V is not orthonormal");
    Matrix b = a * v;
    return IndicatorPair{(a - b * v.transpose()).squaredNorm(), a.squaredNorm() - b.squaredNorm()};
}

/// A^{(s)} from the block recursion A^{(i)} = A^{(i-1)} - A^{(i-1)} V_i V_i^T.
inline Matrix blocked_remainder(const Matrix& a, const std::vector<Matrix>& blocks) {
    Matrix rem = a;
    for (const Matrix& vb : blocks) rem -= (rem * vb) * vb.transpose();
    return rem;
}

/// Max over i of ||P_i^2 - P_i||_max and ||A^{(i)} - A (I - P_i)||_F, where
/// P_i = sum_{j<=i} V_j V_j^T and A^{(i)} comes from the block recursion.
inline double projection_decomposition_check(const Matrix& a, const std::vector<Matrix>& blocks) {
    const Index n = a.cols();
    Matrix proj = Matrix::Zero(n, n);
    Matrix rem = a;
    double worst = 0.0;
    for (const Matrix& vb : blocks) {
        if (vb.rows() != n) throw ShapeError("projection_decomposition_check: block row mismatch");
        proj += vb * vb.transpose();
        rem -= (rem * vb) * vb.transpose();
        worst = std::max(worst, (proj * proj - proj).cwiseAbs().maxCoeff());
        Matrix direct = a - a * proj;
        worst = std::max(worst, (rem - direct).norm());
    }
    return worst;
}

}  // namespace rlra
