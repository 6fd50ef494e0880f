#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "ksfrag/errors.hpp"

namespace ksfrag {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Largest absolute entry of a sparse matrix (0 for an empty matrix).
inline double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

/// max_ij |A_ij - A_ji|.
inline double max_asymmetry(const SparseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const SparseMatrix t = m.transpose();
  return max_abs(SparseMatrix(m - t));
}

/// max |[A, B]_ij| evaluated with sparse products.
inline double commutator_max_norm(const SparseMatrix& a, const SparseMatrix& b) {
  const SparseMatrix ab = a * b;
  const SparseMatrix ba = b * a;
  return max_abs(SparseMatrix(ab - ba));
}

/// A real operator over an indexed basis that is expected to be symmetric.
///
/// The matrix is stored as given; `asymmetry()` is the Hermiticity witness
/// max |A - A^T| computed at construction. Consumers that need exact symmetry
/// (the eigensolver) check the witness against their own tolerance.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;

  explicit SymmetricOperator(SparseMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
      throw InvalidArgument("SymmetricOperator: matrix is not square");
    matrix_.prune(0.0);
    matrix_.makeCompressed();
    asymmetry_ = max_asymmetry(matrix_);
  }

  /// Duplicated (row, col) entries are summed.
  static SymmetricOperator from_triplets(Index dim, const std::vector<Triplet>& triplets) {
    SparseMatrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SymmetricOperator(std::move(m));
  }

  static SymmetricOperator from_dense(const Eigen::MatrixXd& dense) {
    return SymmetricOperator(SparseMatrix(dense.sparseView()));
  }

  static SymmetricOperator identity(Index dim) {
    SparseMatrix m(dim, dim);
    m.setIdentity();
    return SymmetricOperator(std::move(m));
  }

  static SymmetricOperator diagonal(const Eigen::VectorXd& values) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(values.size()));
    for (Index i = 0; i < values.size(); ++i)
      if (values[i] != 0.0) t.emplace_back(i, i, values[i]);
    return from_triplets(values.size(), t);
  }

  Index dim() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  double asymmetry() const { return asymmetry_; }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  double coeff(Index row, Index col) const { return matrix_.coeff(row, col); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix_ * v; }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    return matrix_.cast<std::complex<double>>() * v;
  }

  /// <v|A|v> for a real vector.
  double expectation(const Eigen::VectorXd& v) const { return v.dot(matrix_ * v); }

  /// Re <v|A|v> for a complex vector (exact for symmetric A).
  double expectation(const Eigen::VectorXcd& v) const {
    const Eigen::VectorXd re = v.real();
    const Eigen::VectorXd im = v.imag();
    return re.dot(matrix_ * re) + im.dot(matrix_ * im);
  }

  bool is_diagonal() const {
    for (Index k = 0; k < matrix_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
        if (it.row() != it.col() && it.value() != 0.0) return false;
    return true;
  }

  Eigen::VectorXd diagonal_values() const { return matrix_.diagonal(); }

  friend SymmetricOperator operator+(const SymmetricOperator& a, const SymmetricOperator& b) {
    check_same_dim(a, b);
    return SymmetricOperator(SparseMatrix(a.matrix_ + b.matrix_));
  }
  friend SymmetricOperator operator-(const SymmetricOperator& a, const SymmetricOperator& b) {
    check_same_dim(a, b);
    return SymmetricOperator(SparseMatrix(a.matrix_ - b.matrix_));
  }
  friend SymmetricOperator operator*(double s, const SymmetricOperator& a) {
    return SymmetricOperator(SparseMatrix(s * a.matrix_));
  }

 private:
  static void check_same_dim(const SymmetricOperator& a, const SymmetricOperator& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("SymmetricOperator: dimension mismatch");
  }

  SparseMatrix matrix_;
  double asymmetry_ = 0.0;
};

inline double commutator_max_norm(const SymmetricOperator& a, const SymmetricOperator& b) {
  return commutator_max_norm(a.matrix(), b.matrix());
}

/// B^T A B for an orthonormal column basis B (dense result).
inline SymmetricOperator restrict_operator(const SymmetricOperator& op, const Eigen::MatrixXd& basis) {
  if (basis.rows() != op.dim()) throw InvalidArgument("restrict_operator: basis dimension mismatch");
  Eigen::MatrixXd reduced = basis.transpose() * (op.matrix() * basis);
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  return SymmetricOperator::from_dense(reduced);
}

}  // namespace ksfrag
