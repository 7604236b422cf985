#pragma once

// Exact linear algebra over a field scalar (in practice boxworld::Rational).
// Every routine pivots on the first nonzero entry; nothing here compares
// magnitudes, so the results are exact for any exact field type.

#include <boxworld/scalar.hpp>

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace boxworld::linalg {

/// Reduced row echelon form, in place. Returns the pivot column of each
/// nonzero row, in row order.
template <typename Scalar>
std::vector<Eigen::Index> rref_in_place(MatrixX<Scalar>& m) {
  const Scalar zero(0);
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index pivot = row;
    while (pivot < m.rows() && m(pivot, col) == zero) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row) m.row(pivot).swap(m.row(row));
    const Scalar inv = Scalar(1) / m(row, col);
    m.row(row) *= inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == zero) continue;
      const Scalar factor = m(r, col);
      m.row(r) -= factor * m.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename Derived>
Eigen::Index rank(const Eigen::MatrixBase<Derived>& a) {
  MatrixX<typename Derived::Scalar> m = a;
  return static_cast<Eigen::Index>(rref_in_place(m).size());
}

/// Unique solution of a square system, or nullopt when singular.
template <typename DerivedA, typename DerivedB>
std::optional<VectorX<typename DerivedA::Scalar>> solve(const Eigen::MatrixBase<DerivedA>& a,
                                                        const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) return std::nullopt;
  MatrixX<Scalar> aug(n, n + 1);
  aug.leftCols(n) = a;
  aug.col(n) = b;
  const auto pivots = rref_in_place(aug);
  if (static_cast<Eigen::Index>(pivots.size()) != n || pivots.back() != n - 1) return std::nullopt;
  return VectorX<Scalar>(aug.col(n));
}

template <typename Derived>
std::optional<MatrixX<typename Derived::Scalar>> inverse(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) return std::nullopt;
  MatrixX<Scalar> aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = MatrixX<Scalar>::Identity(n, n);
  const auto pivots = rref_in_place(aug);
  if (static_cast<Eigen::Index>(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  return MatrixX<Scalar>(aug.rightCols(n));
}

/// Kronecker product; the left factor's index varies slowest.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  MatrixX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> kron_vec(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  VectorX<Scalar> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Incrementally maintained echelon basis of a growing set of vectors.
/// `coordinates` expresses a vector in terms of the accepted vectors, in
/// insertion order.
template <typename Scalar>
class IncrementalBasis {
 public:
  explicit IncrementalBasis(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dimension() const { return dim_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(rows_.size()); }
  bool full() const { return size() == dim_; }

  /// Adds v if it is independent of the current span. Returns whether it was added.
  bool try_add(const VectorX<Scalar>& v) {
    VectorX<Scalar> r = v;
    VectorX<Scalar> combo = VectorX<Scalar>::Zero(size() + 1);
    combo(size()) = Scalar(1);
    reduce(r, combo);
    Eigen::Index pivot = 0;
    while (pivot < dim_ && r(pivot) == Scalar(0)) ++pivot;
    if (pivot == dim_) return false;
    for (auto& c : combos_) c.conservativeResize(size() + 1), c(size()) = Scalar(0);
    const Scalar inv = Scalar(1) / r(pivot);
    rows_.push_back(r * inv);
    combos_.push_back(combo * inv);
    pivots_.push_back(pivot);
    return true;
  }

  bool contains(const VectorX<Scalar>& v) const {
    VectorX<Scalar> r = v;
    VectorX<Scalar> combo = VectorX<Scalar>::Zero(size());
    reduce(r, combo);
    return r.isZero();
  }

  /// Coefficients c with v = sum_k c_k * (k-th accepted vector), if v is in the span.
  std::optional<VectorX<Scalar>> coordinates(const VectorX<Scalar>& v) const {
    VectorX<Scalar> r = v;
    VectorX<Scalar> combo = VectorX<Scalar>::Zero(size());
    reduce(r, combo);
    if (!r.isZero()) return std::nullopt;
    return VectorX<Scalar>(-combo);
  }

 private:
  // Invariant: rows_[k] = sum_j combos_[k](j) * accepted_j.
  void reduce(VectorX<Scalar>& r, VectorX<Scalar>& combo) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Scalar f = r(pivots_[k]);
      if (f == Scalar(0)) continue;
      r -= f * rows_[k];
      combo.head(combos_[k].size()) -= f * combos_[k];
    }
  }

  Eigen::Index dim_;
  std::vector<VectorX<Scalar>> rows_;
  std::vector<VectorX<Scalar>> combos_;
  std::vector<Eigen::Index> pivots_;
};

}  // namespace boxworld::linalg
