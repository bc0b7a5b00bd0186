#pragma once
//
// Dense storage, index permutations, norms and seeded Gaussian sampling.
//
// Every matrix in the library is an Eigen::MatrixXd: column-major, 64-bit.
// Permutations are index vectors; contracts are stated in index form, so
// apply_row_perm(p, A)(i, j) == A(p[i], j).
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace rlra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index  = Eigen::Index;

/// Seed for every random draw. Identical seed gives bit-identical output on one build.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

/// Independent child seed for a named sub-stream (splitmix64 finalizer).
inline Seed derive(Seed s, std::uint64_t stream) {
    std::uint64_t z = s.value + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Seed{z ^ (z >> 31)};
}

/// Bijection on {0, ..., n-1}, stored as indices.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<Index> indices) : idx_(std::move(indices)) {
        std::vector<char> seen(idx_.size(), 0);
        for (Index i : idx_) {
            if (i < 0 || static_cast<std::size_t>(i) >= idx_.size() || seen[i])
                throw ShapeError("permutation is not a bijection on 0..n-1");
            seen[i] = 1;
        }
    }

    static Permutation identity(Index n) {
        std::vector<Index> v(static_cast<std::size_t>(n));
        std::iota(v.begin(), v.end(), Index{0});
        return Permutation(std::move(v), unchecked{});
    }

    Index size() const noexcept { return static_cast<Index>(idx_.size()); }
    Index operator[](Index i) const { return idx_[static_cast<std::size_t>(i)]; }
    std::span<const Index> indices() const noexcept { return idx_; }

    Permutation inverse() const {
        std::vector<Index> inv(idx_.size());
        for (std::size_t i = 0; i < idx_.size(); ++i) inv[static_cast<std::size_t>(idx_[i])] = static_cast<Index>(i);
        return Permutation(std::move(inv), unchecked{});
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    struct unchecked {};
    Permutation(std::vector<Index> v, unchecked) : idx_(std::move(v)) {}

    std::vector<Index> idx_;
};

/// m x n matrix of i.i.d. standard normals, filled in column-major order.
inline Matrix gaussian(Seed seed, Index m, Index n) {
    if (m < 1 || n < 1) throw ShapeError("gaussian: dimensions must be positive");
    std::mt19937_64 gen(seed.value);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix out(m, n);
    double* data = out.data();
    for (Index i = 0, total = m * n; i < total; ++i) data[i] = dist(gen);
    return out;
}

inline double fro_norm(const Matrix& a) { return a.norm(); }

/// ||A - Ak||_F / ||A||_F.
inline double rel_fro_error(const Matrix& a, const Matrix& ak) {
    if (a.rows() != ak.rows() || a.cols() != ak.cols())
        throw ShapeError("rel_fro_error: shape mismatch");
    const double denom = a.norm();
    if (denom == 0.0) throw ShapeError("rel_fro_error: reference matrix has zero norm");
    return (a - ak).norm() / denom;
}

/// out(i, j) = A(p[i], j)
inline Matrix apply_row_perm(const Permutation& p, const Matrix& a) {
    if (p.size() != a.rows()) throw ShapeError("apply_row_perm: length mismatch");
    Matrix out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = a(p[i], j);
    return out;
}

/// out(i, j) = A(i, q[j])
inline Matrix apply_col_perm(const Matrix& a, const Permutation& q) {
    if (q.size() != a.cols()) throw ShapeError("apply_col_perm: length mismatch");
    Matrix out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j) out.col(j) = a.col(q[j]);
    return out;
}

/// Inverse of apply_row_perm: out(p[i], j) = A(i, j).
inline Matrix scatter_rows(const Permutation& p, const Matrix& a) {
    if (p.size() != a.rows()) throw ShapeError("scatter_rows: length mismatch");
    Matrix out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(p[i], j) = a(i, j);
    return out;
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace rlra
