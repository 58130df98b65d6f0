#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cso/conjugation.hpp"
#include "cso/errors.hpp"

// Finite stand-in for the strong-* approximation of an arbitrary operator by
// complex symmetric ones: T_n = A_n + C_n A_n* C_n + 0, A_n the leading
// principal submatrix.

namespace cso {

/// Matrix of an operator in a fixed orthonormal basis, T(j, k) = <T e_k, e_j>.
class DenseOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) throw DomainError("DenseOperator: matrix must be square, D >= 1");
  }

  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  double norm() const { return operator_norm(m_); }
  DenseOperator adjoint() const { return DenseOperator(m_.adjoint()); }

 private:
  Eigen::MatrixXcd m_;
};

/// The upper-left n x n block A_n.
inline Eigen::MatrixXcd principal_submatrix(const DenseOperator& t, std::size_t n) {
  if (n < 1 || n > t.dimension())
    throw DomainError("principal_submatrix: n = " + std::to_string(n) + " outside 1.." + std::to_string(t.dimension()));
  const auto k = static_cast<Eigen::Index>(n);
  return t.matrix().topLeftCorner(k, k);
}

struct SstApproximant {
  DenseOperator op;
  /// Conjugation exchanging the two n-blocks through C_n and conjugating the
  /// zero tail: W (x, y, z) = (C_n y, C_n x, conj z). T_n = W T_n* W.
  ConjugationSpec witness;
};

/// T_n = A_n + C_n A_n* C_n + 0 on an ambient space of dimension `ambient`
/// (default 2n + 4), with its witness conjugation.
inline SstApproximant sst_approximant(const Eigen::MatrixXcd& a, const ConjugationSpec& c,
                                      std::optional<std::size_t> ambient = std::nullopt) {
  if (a.rows() != a.cols() || a.rows() < 1) throw DomainError("sst_approximant: A_n must be square and nonempty");
  const auto n = static_cast<std::size_t>(a.rows());
  if (c.dimension() != n)
    throw DomainError("sst_approximant: conjugation has dimension " + std::to_string(c.dimension()) + ", A_n has " +
                      std::to_string(n));
  const std::size_t dim = ambient.value_or(2 * n + 4);
  if (dim < 2 * n) throw DomainError("sst_approximant: ambient dimension must be at least 2n");

  const auto k = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d, d);
  t.topLeftCorner(k, k) = a;
  t.block(k, k, k, k) = conjugate_adjoint(a, c);

  const Eigen::MatrixXcd s = c.matrix();
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(d, d);
  w.block(0, k, k, k) = s;
  w.block(k, 0, k, k) = s;
  w.bottomRightCorner(d - 2 * k, d - 2 * k).setIdentity();
  return {DenseOperator(std::move(t)), ConjugationSpec::symmetric_unitary(std::move(w))};
}

/// ||T e_i - T_n e_i||^2 restricted to the ambient basis: sum_{j > n} |T(j, i)|^2
/// (1-based i, n).
inline double sot_residual(const DenseOperator& t, std::size_t n, std::size_t i) {
  const std::size_t dim = t.dimension();
  if (i < 1 || i > dim) throw DomainError("sot_residual: column index out of range");
  if (n < i || n > dim) throw DomainError("sot_residual: need i <= n <= D");
  const auto col = static_cast<Eigen::Index>(i - 1);
  const auto tail = static_cast<Eigen::Index>(dim - n);
  if (tail == 0) return 0.0;
  return t.matrix().col(col).tail(tail).squaredNorm();
}

/// Residuals for n = 1..D (rows) and i = 1..D (columns); entries with i > n
/// are left empty.
inline std::vector<std::vector<std::optional<double>>> residual_grid(const DenseOperator& t) {
  const std::size_t dim = t.dimension();
  std::vector<std::vector<std::optional<double>>> grid(dim, std::vector<std::optional<double>>(dim));
  for (std::size_t n = 1; n <= dim; ++n)
    for (std::size_t i = 1; i <= n; ++i) grid[n - 1][i - 1] = sot_residual(t, n, i);
  return grid;
}

inline void write_residual_csv(std::ostream& out, const std::vector<std::vector<std::optional<double>>>& grid) {
  out << "n";
  for (std::size_t i = 1; i <= grid.size(); ++i) out << ",i" << i;
  out << '\n';
  out.precision(17);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    out << n + 1;
    for (const auto& v : grid[n]) {
      out << ',';
      if (v) out << *v;
    }
    out << '\n';
  }
}

}  // namespace cso
