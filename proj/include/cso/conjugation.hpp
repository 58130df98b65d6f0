#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cso/errors.hpp"

namespace cso {

using Complex = std::complex<double>;

/// Largest singular value; 0 for an empty matrix.
template <class Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::BDCSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// Whether S is symmetric and unitary, both to `tol` in operator norm.
inline bool is_symmetric_unitary(const Eigen::MatrixXcd& s, double tol) {
  if (s.rows() != s.cols()) return false;
  const auto n = s.rows();
  return operator_norm(s - s.transpose()) <= tol &&
         operator_norm(s * s.adjoint() - Eigen::MatrixXcd::Identity(n, n)) <= tol;
}

/// A conjugation on C^n written as C x = S conj(x). Either the block-wise
/// coordinate reversal (S a block anti-diagonal permutation) or an explicit
/// symmetric unitary S.
class ConjugationSpec {
 public:
  enum class Kind { block_reversal, symmetric_unitary };

  static ConjugationSpec block_reversal(std::vector<std::size_t> block_sizes) {
    for (std::size_t s : block_sizes)
      if (s == 0) throw DomainError("block_reversal: block sizes must be positive");
    ConjugationSpec c;
    c.data_ = Reversal{std::move(block_sizes)};
    return c;
  }

  static ConjugationSpec symmetric_unitary(Eigen::MatrixXcd s, double tol = 1e-10) {
    if (!is_symmetric_unitary(s, tol))
      throw DomainError("symmetric_unitary: matrix is not symmetric and unitary within tolerance");
    ConjugationSpec c;
    c.data_ = std::move(s);
    return c;
  }

  /// Plain entrywise conjugation (S = I).
  static ConjugationSpec identity(std::size_t n) {
    return symmetric_unitary(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  Kind kind() const { return std::holds_alternative<Reversal>(data_) ? Kind::block_reversal : Kind::symmetric_unitary; }

  std::size_t dimension() const {
    if (auto* r = std::get_if<Reversal>(&data_))
      return std::accumulate(r->sizes.begin(), r->sizes.end(), std::size_t{0});
    return static_cast<std::size_t>(std::get<Eigen::MatrixXcd>(data_).rows());
  }

  /// Block sizes of a reversal; empty for the matrix kind.
  const std::vector<std::size_t>& block_sizes() const {
    static const std::vector<std::size_t> none;
    if (auto* r = std::get_if<Reversal>(&data_)) return r->sizes;
    return none;
  }

  /// 0-based coordinate map p with (C x)_i = conj(x_{p(i)}); reversal kind only.
  std::vector<std::size_t> permutation() const {
    const auto* r = std::get_if<Reversal>(&data_);
    if (!r) throw DomainError("permutation: conjugation is not a block reversal");
    std::vector<std::size_t> p;
    p.reserve(dimension());
    std::size_t offset = 0;
    for (std::size_t size : r->sizes) {
      for (std::size_t i = 0; i < size; ++i) p.push_back(offset + size - 1 - i);
      offset += size;
    }
    return p;
  }

  /// The symmetric unitary S with C x = S conj(x).
  Eigen::MatrixXcd matrix() const {
    if (auto* s = std::get_if<Eigen::MatrixXcd>(&data_)) return *s;
    const auto p = permutation();
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) s(i, static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)])) = 1.0;
    return s;
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension()) throw DomainError("apply: dimension mismatch");
    if (auto* s = std::get_if<Eigen::MatrixXcd>(&data_)) return *s * x.conjugate();
    const auto p = permutation();
    Eigen::VectorXcd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = std::conj(x(static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)])));
    return y;
  }

 private:
  struct Reversal {
    std::vector<std::size_t> sizes;
  };

  ConjugationSpec() = default;

  std::variant<Reversal, Eigen::MatrixXcd> data_;
};

/// C T* C for C = S conj(.): the matrix S conj(T*) conj(S) = S T^T conj(S).
inline Eigen::MatrixXcd conjugate_adjoint(const Eigen::MatrixXcd& t, const ConjugationSpec& c) {
  if (static_cast<std::size_t>(t.rows()) != c.dimension() || t.rows() != t.cols())
    throw DomainError("conjugate_adjoint: dimension mismatch");
  const Eigen::MatrixXcd s = c.matrix();
  return s * t.transpose() * s.conjugate();
}

/// ||T - C T* C|| in operator norm.
inline double conjugation_defect(const Eigen::MatrixXcd& t, const ConjugationSpec& c) {
  return operator_norm(t - conjugate_adjoint(t, c));
}

}  // namespace cso
