#pragma once
//
// Matrix access through products only. Range finders and drivers touch A via
// A * X, A^T * X, the shape, and ||A||_F^2; nothing else. That lets sparse
// operands and instrumented wrappers share one code path.
//

#include <concepts>
#include <cstddef>

#include <Eigen/SparseCore>

#include "matrix.hpp"

namespace rlra {

template <class Op>
concept LinearOperator = requires(const Op& op, const Matrix& x) {
    { op.rows() } -> std::convertible_to<Index>;
    { op.cols() } -> std::convertible_to<Index>;
    { op.apply(x) } -> std::convertible_to<Matrix>;
    { op.apply_transpose(x) } -> std::convertible_to<Matrix>;
    { op.squared_norm() } -> std::convertible_to<double>;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Non-owning view of a dense matrix.
class DenseOperator {
public:
    explicit DenseOperator(const Matrix& a) : a_(&a) {}

    Index rows() const { return a_->rows(); }
    Index cols() const { return a_->cols(); }
    Matrix apply(const Matrix& x) const { return *a_ * x; }
    Matrix apply_transpose(const Matrix& x) const { return a_->transpose() * x; }
    double squared_norm() const { return a_->squaredNorm(); }
    const Matrix& matrix() const { return *a_; }

private:
    const Matrix* a_;
};

/// Non-owning view of a column-compressed sparse matrix.
class SparseOperator {
public:
    explicit SparseOperator(const SparseMatrix& a) : a_(&a) {}

    Index rows() const { return a_->rows(); }
    Index cols() const { return a_->cols(); }
    Matrix apply(const Matrix& x) const { return *a_ * x; }
    Matrix apply_transpose(const Matrix& x) const { return a_->transpose() * x; }
    double squared_norm() const { return a_->squaredNorm(); }
    const SparseMatrix& matrix() const { return *a_; }

private:
    const SparseMatrix* a_;
};

/// Wraps an operator and counts every product issued against it.
/// One product is one pass over A.
template <LinearOperator Inner>
class Counted {
public:
    explicit Counted(const Inner& inner) : inner_(&inner) {}

    Index rows() const { return inner_->rows(); }
    Index cols() const { return inner_->cols(); }
    Matrix apply(const Matrix& x) const {
        ++products_;
        return inner_->apply(x);
    }
    Matrix apply_transpose(const Matrix& x) const {
        ++products_;
        return inner_->apply_transpose(x);
    }
    double squared_norm() const { return inner_->squared_norm(); }

    std::size_t product_count() const { return products_; }
    void reset() { products_ = 0; }

private:
    const Inner* inner_;
    mutable std::size_t products_ = 0;
};

template <LinearOperator Inner>
Counted(const Inner&) -> Counted<Inner>;

}  // namespace rlra
