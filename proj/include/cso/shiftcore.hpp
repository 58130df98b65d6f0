#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cso/conjugation.hpp"
#include "cso/errors.hpp"
#include "cso/rational.hpp"
#include "cso/weightgen.hpp"

namespace cso {

// Structural tests are templates over the weight representation: concrete
// exact rationals, or WeightRef handles into a (possibly huge) sequence. A
// weight type W needs weight_is_zero, weight_is_negative and weights_equal.

inline bool weight_is_zero(const Rational& w) { return sgn(w) == 0; }
inline bool weight_is_negative(const Rational& w) { return sgn(w) < 0; }
inline bool weights_equal(const Rational& a, const Rational& b) { return a == b; }

/// One irreducible block of a truncated shift: an n x n matrix with the
/// (strictly positive) weights on the first subdiagonal, n = weights + 1.
template <class W>
struct FiniteShiftBlock {
  std::vector<W> weights;

  std::size_t dimension() const { return weights.size() + 1; }
};

/// A weight list split at its zeros. Blocks and zeros interleave:
/// block_0, 0, block_1, 0, ..., block_z, so there is always one more block
/// than zero (1 x 1 zero blocks are kept).
template <class W>
struct BlockDecomposition {
  std::vector<FiniteShiftBlock<W>> blocks;
  std::vector<std::uint64_t> zero_positions;  // 1-based weight indices

  std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& b : blocks) d += b.dimension();
    return d;
  }

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(blocks.size());
    for (const auto& b : blocks) sizes.push_back(b.dimension());
    return sizes;
  }

  /// The weight list this decomposition came from.
  std::vector<W> reassemble(const W& zero = W{}) const {
    std::vector<W> out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (i > 0) out.push_back(zero);
      out.insert(out.end(), blocks[i].weights.begin(), blocks[i].weights.end());
    }
    return out;
  }
};

using ShiftBlock = FiniteShiftBlock<Rational>;
using Decomposition = BlockDecomposition<Rational>;

template <class W>
BlockDecomposition<W> decompose(std::span<const W> weights) {
  BlockDecomposition<W> d;
  d.blocks.emplace_back();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const W& w = weights[i];
    if (weight_is_negative(w)) throw DomainError("decompose: negative weight at index " + std::to_string(i + 1));
    if (weight_is_zero(w)) {
      d.zero_positions.push_back(i + 1);
      d.blocks.emplace_back();
    } else {
      d.blocks.back().weights.push_back(w);
    }
  }
  return d;
}

template <class W>
BlockDecomposition<W> decompose(const std::vector<W>& weights) {
  return decompose(std::span<const W>(weights));
}

/// alpha_j == alpha_{n-j} for every j, exactly.
template <class W>
bool is_palindromic(const FiniteShiftBlock<W>& block) {
  const auto& w = block.weights;
  for (std::size_t i = 0, j = w.size(); i + 1 < j; ++i, --j)
    if (!weights_equal(w[i], w[j - 1])) return false;
  return true;
}

/// Every block palindromic: the truncation is complex symmetric.
template <class W>
bool is_cso_truncation(const BlockDecomposition<W>& d) {
  return std::all_of(d.blocks.begin(), d.blocks.end(), [](const auto& b) { return is_palindromic(b); });
}

/// The block-wise reversal-and-conjugation map C = (+) C_i.
template <class W>
ConjugationSpec reversal_conjugation(const BlockDecomposition<W>& d) {
  return ConjugationSpec::block_reversal(d.block_sizes());
}

/// Dense (L+1) x (L+1) weighted shift with the weights on the subdiagonal.
inline Eigen::MatrixXd shift_matrix(std::span<const Rational> weights) {
  const auto n = static_cast<Eigen::Index>(weights.size()) + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) t(i + 1, i) = weights[static_cast<std::size_t>(i)].get_d();
  return t;
}

/// ||T - C T* C|| for the shift with these weights. For a block reversal the
/// difference matrix is formed in exact arithmetic and the result is exactly
/// 0 when it vanishes; otherwise its largest singular value is returned.
inline double cso_defect(std::span<const Rational> weights, const ConjugationSpec& c) {
  const std::size_t n = weights.size() + 1;
  if (c.dimension() != n)
    throw DomainError("cso_defect: conjugation has dimension " + std::to_string(c.dimension()) + ", shift has " +
                      std::to_string(n));

  if (c.kind() == ConjugationSpec::Kind::symmetric_unitary) {
    Eigen::MatrixXcd t = shift_matrix(weights).cast<Complex>();
    return conjugation_defect(t, c);
  }

  // With C = P conj(.) and real T, C T* C = P T^T P. T has entries (i+1, i);
  // P T^T P moves the entry of (a, b) to (p(b), p(a)).
  const auto p = c.permutation();
  std::map<std::pair<std::size_t, std::size_t>, Rational> diff;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (sgn(weights[i]) == 0) continue;
    diff[{i + 1, i}] += weights[i];
    diff[{p[i], p[i + 1]}] -= weights[i];
  }
  std::erase_if(diff, [](const auto& kv) { return sgn(kv.second) == 0; });
  if (diff.empty()) return 0.0;

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [pos, v] : diff)
    dense(static_cast<Eigen::Index>(pos.first), static_cast<Eigen::Index>(pos.second)) = v.get_d();
  return operator_norm(dense);
}

inline double cso_defect(const std::vector<Rational>& weights, const ConjugationSpec& c) {
  return cso_defect(std::span<const Rational>(weights), c);
}

/// ||T|| = max weight (0 for the 1 x 1 zero shift).
inline Rational shift_norm(std::span<const Rational> weights) {
  Rational best = 0;
  for (const auto& w : weights) {
    if (w < 0) throw DomainError("shift_norm: negative weight");
    if (w > best) best = w;
  }
  return best;
}

/// ||T1 - T2|| for two shifts on the same basis: max |w1_n - w2_n|.
inline Rational shift_distance(std::span<const Rational> a, std::span<const Rational> b) {
  if (a.size() != b.size())
    throw DomainError("shift_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  Rational best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = abs(Rational(a[i] - b[i]));
    if (d > best) best = d;
  }
  return best;
}

/// beta_n = alpha_n when alpha_n > eps, else 0 (ties are zeroed), n <= prefix_len.
inline std::vector<Rational> truncate_by_threshold(const WeightSequence& seq, const Rational& eps,
                                                   std::uint64_t prefix_len) {
  if (eps <= 0) throw DomainError("truncate_by_threshold: eps must be positive");
  std::vector<Rational> out;
  out.reserve(prefix_len);
  for (std::uint64_t n = 1; n <= prefix_len; ++n)
    out.push_back(compare(seq, n, eps) > 0 ? seq(n) : Rational(0));
  return out;
}

/// A finite weight list standing in for an infinite weight sequence: either
/// the listed zeros are all of them (the tail is strictly positive), or the
/// sequence is known to vanish infinitely often.
struct WeightPattern {
  std::vector<Rational> weights;
  bool infinitely_many_zeros = false;
};

struct KernelReport {
  std::uint64_t num_zeros = 0;
  bool obstructed = false;
  std::string verdict;
};

/// Kernel-dimension obstruction for the modeled infinite shift: with exactly
/// N zeros, dim ker T = N but dim ker T* = N + 1, so T is not complex symmetric.
inline KernelReport kernel_obstruction(const WeightPattern& pattern) {
  KernelReport r;
  for (const auto& w : pattern.weights) {
    if (w < 0) throw DomainError("kernel_obstruction: negative weight");
    if (sgn(w) == 0) ++r.num_zeros;
  }
  if (pattern.infinitely_many_zeros) {
    r.verdict = "no obstruction: infinitely many zero weights";
    return r;
  }
  r.obstructed = true;
  const std::string n = std::to_string(r.num_zeros);
  r.verdict = "not complex symmetric: dim ker T = " + n + " but dim ker T* = " + std::to_string(r.num_zeros + 1);
  return r;
}

}  // namespace cso
