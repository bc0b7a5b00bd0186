#pragma once
//
// Synthetic test matrices: A = U diag(sigma) V^T with prescribed spectra, and
// sparse matrices with a uniformly random pattern.
//

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "kernels.hpp"
#include "operator.hpp"

namespace rlra {

enum class DecayKind { Slow, Fast, SShaped, Custom };

struct DecaySpec {
    DecayKind kind = DecayKind::Fast;
    Index m = 0;
    Index n = 0;
    Seed seed{};
    std::function<double(Index)> custom;  // sigma_k for 1-based k, Custom only
};

/// sigma_k, 1-based.
inline double decay_value(DecayKind kind, Index k) {
    const double x = static_cast<double>(k);
    switch (kind) {
        case DecayKind::Slow: return 1.0 / (x * x);
        case DecayKind::Fast: return std::exp(-x / 7.0);
        case DecayKind::SShaped: return 0.0001 + 1.0 / (1.0 + std::exp(x - 30.0));
        case DecayKind::Custom: break;
    }
    throw ShapeError("decay_value: Custom spectra need a generator");
}

inline Vector decay_spectrum(const DecaySpec& spec, Index count) {
    Vector s(count);
    for (Index i = 0; i < count; ++i)
        s(i) = spec.kind == DecayKind::Custom ? spec.custom(i + 1) : decay_value(spec.kind, i + 1);
    return s;
}

struct GeneratedMatrix {
    Matrix A;
    Vector sigma;  // length min(m, n)
};

/// Orthonormal m x r factor from the QR of a Gaussian.
inline Matrix random_orthonormal(Seed seed, Index m, Index r) { return eqr(gaussian(seed, m, r)).Q; }

inline GeneratedMatrix gen_decay(const DecaySpec& spec) {
    if (spec.m < 1 || spec.n < 1) throw ShapeError("gen_decay: m and n must be >= 1");
    if (spec.kind == DecayKind::Custom && !spec.custom) throw ShapeError("gen_decay: Custom kind without a generator");
    const Index r = std::min(spec.m, spec.n);
    GeneratedMatrix out;
    out.sigma = decay_spectrum(spec, r);
    const Matrix u = random_orthonormal(derive(spec.seed, 1), spec.m, r);
    const Matrix v = random_orthonormal(derive(spec.seed, 2), spec.n, r);
    out.A = u * out.sigma.asDiagonal() * v.transpose();
    return out;
}

/// Exactly rank-r matrix with singular values 1, 1/2, ..., 1/r.
inline GeneratedMatrix gen_low_rank(Index m, Index n, Index r, Seed seed) {
    if (r < 1 || r > std::min(m, n)) throw ShapeError("gen_low_rank: rank must satisfy 1 <= r <= min(m, n)");
    DecaySpec spec{DecayKind::Custom, m, n, seed, [r](Index k) { return k <= r ? 1.0 / static_cast<double>(k) : 0.0; }};
    return gen_decay(spec);
}

/// Bernoulli(density) pattern, values uniform on (0, 1). Gaps between nonzeros
/// in column-major order are drawn geometrically, so cost scales with nnz.
inline SparseMatrix gen_sparse(Index m, Index n, double density, Seed seed) {
    if (m < 1 || n < 1) throw ShapeError("gen_sparse: m and n must be >= 1");
    if (!(density > 0.0 && density <= 1.0)) throw ShapeError("gen_sparse: density must lie in (0, 1]");
    std::mt19937_64 gen(seed.value);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(density * static_cast<double>(m) * static_cast<double>(n) * 1.1) + 16);
    const long double total = static_cast<long double>(m) * static_cast<long double>(n);
    if (density >= 1.0) {
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < m; ++i) entries.emplace_back(i, j, value(gen));
    } else {
        std::geometric_distribution<long long> gap(density);
        long double pos = static_cast<long double>(gap(gen));
        while (pos < total) {
            const auto idx = static_cast<long long>(pos);
            entries.emplace_back(static_cast<Index>(idx % m), static_cast<Index>(idx / m), value(gen));
            pos += 1.0L + static_cast<long double>(gap(gen));
        }
    }
    SparseMatrix a(m, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    return a;
}

struct OracleError {
    double fro = 0.0;
    double spec = 0.0;
};

/// Best rank-k errors from a known spectrum.
inline OracleError oracle_error(const Vector& sigma, Index k) {
    if (k < 0 || k >= sigma.size()) throw ShapeError("oracle_error: k must be < len(sigma)");
    const Index tail = sigma.size() - k;
    return OracleError{sigma.tail(tail).norm(), sigma(k)};
}

/// Relative Frobenius optimum ||A - A_k||_F / ||A||_F.
inline double oracle_rel_error(const Vector& sigma, Index k) { return oracle_error(sigma, k).fro / sigma.norm(); }

}  // namespace rlra
