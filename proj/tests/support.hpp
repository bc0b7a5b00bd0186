#pragma once
// Test-side oracles and a tiny property-case generator. Nothing here calls the
// library's factorization kernels, so checks do not collapse onto the code
// under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix randn(std::uint64_t seed, Index m, Index n) {
    std::mt19937_64 gen(seed ^ 0xA5A5A5A5ull);
    std::normal_distribution<double> d;
    Matrix a(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) a(i, j) = d(gen);
    return a;
}

/// Modified Gram-Schmidt, run twice.
inline Matrix gram_schmidt(const Matrix& x) {
    Matrix q = x;
    for (int pass = 0; pass < 2; ++pass)
        for (Index j = 0; j < q.cols(); ++j) {
            for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
            q.col(j) /= q.col(j).norm();
        }
    return q;
}

inline Matrix orthonormal(std::uint64_t seed, Index m, Index r) { return gram_schmidt(randn(seed, m, r)); }

/// Exactly rank-r product of Gaussians.
inline Matrix low_rank(std::uint64_t seed, Index m, Index n, Index r) {
    return randn(seed, m, r) * randn(seed + 1, r, n);
}

inline Vector singular_values(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues(); }

inline double spectral_norm(const Matrix& a) {
    const Vector s = singular_values(a);
    return s.size() ? s(0) : 0.0;
}

/// Largest principal angle via the sine of the projection residual.
inline double max_angle(const Matrix& x, const Matrix& y) {
    const Matrix qx = gram_schmidt(x);
    const Matrix qy = gram_schmidt(y);
    const Matrix resid = qy - qx * (qx.transpose() * qy);
    return std::asin(std::min(1.0, spectral_norm(resid)));
}

/// sum_{i > k} exp(-2 i / 7), i up to n, in closed form.
inline double fast_tail_energy(Index k, Index n) {
    const double r = std::exp(-2.0 / 7.0);
    return std::pow(r, static_cast<double>(k + 1)) * (1.0 - std::pow(r, static_cast<double>(n - k))) / (1.0 - r);
}

inline Matrix diag(std::initializer_list<double> d) {
    Vector v(static_cast<Index>(d.size()));
    Index i = 0;
    for (double x : d) v(i++) = x;
    return v.asDiagonal();
}

}  // namespace oracle

namespace prop {

/// Draws property-test cases from a fixed stream so failures replay.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long between(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::uint64_t seed() { return rng_(); }
    oracle::Matrix matrix(oracle::Index m, oracle::Index n) { return oracle::randn(seed(), m, n); }

private:
    std::mt19937_64 rng_;
};

/// Runs `body(gen, case_index)` for `cases` draws.
template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
    Gen gen(seed);
    for (int c = 0; c < cases; ++c) body(gen, c);
}

}  // namespace prop
