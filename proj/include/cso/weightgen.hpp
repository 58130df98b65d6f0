#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cso/errors.hpp"
#include "cso/rational.hpp"

namespace cso {

// ---------------------------------------------------------------------------
// Weight sequences
// ---------------------------------------------------------------------------

/// A lazily evaluated weight sequence alpha_1, alpha_2, ... of exact
/// nonnegative rationals (1-based).
///
/// Besides exact evaluation a sequence can supply rational enclosures of
/// bounded width. Sequences whose exact values are expensive (the perturbed
/// example carries 3^-n terms) use them so that comparisons are decided
/// cheaply and only refined to exact arithmetic on near ties. Sequences
/// without an enclosure function fall back to exact point intervals.
///
/// Copies share the (immutable) evaluation functions.
class WeightSequence {
 public:
  using ExactFn = std::function<Rational(std::uint64_t)>;
  using EncloseFn = std::function<Enclosure(std::uint64_t, unsigned)>;

  WeightSequence(std::string name, ExactFn exact, EncloseFn enclose = nullptr,
                 std::optional<Rational> known_sup = std::nullopt,
                 std::optional<std::uint64_t> length = std::nullopt)
      : impl_(std::make_shared<const Impl>(Impl{std::move(name), std::move(exact), std::move(enclose),
                                                std::move(known_sup), length})) {}

  const std::string& name() const { return impl_->name; }
  const std::optional<Rational>& known_sup() const { return impl_->known_sup; }

  /// Number of available terms; empty for infinite sequences.
  std::optional<std::uint64_t> length() const { return impl_->length; }

  bool has_index(std::uint64_t n) const { return n >= 1 && (!impl_->length || n <= *impl_->length); }

  Rational operator()(std::uint64_t n) const {
    check_index(n);
    Rational value = impl_->exact(n);
    if (value < 0) throw DomainError(name() + ": negative weight at index " + std::to_string(n));
    return value;
  }

  Enclosure enclose(std::uint64_t n, unsigned bits) const {
    if (!impl_->enclose) {
      Rational v = (*this)(n);
      return {v, v};
    }
    check_index(n);
    return impl_->enclose(n, bits);
  }

  /// True when enclosures are always exact points (no refinement needed).
  bool exact_only() const { return !impl_->enclose; }

 private:
  struct Impl {
    std::string name;
    ExactFn exact;
    EncloseFn enclose;
    std::optional<Rational> known_sup;
    std::optional<std::uint64_t> length;
  };

  void check_index(std::uint64_t n) const {
    if (n < 1) throw DomainError(name() + ": weight indices start at 1");
    if (impl_->length && n > *impl_->length)
      throw DomainError(name() + ": index " + std::to_string(n) + " beyond sequence length " +
                        std::to_string(*impl_->length));
  }

  std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline int sign_of(const Rational& r) { return sgn(r); }

/// Runs `decide(bits)` over the precision ladder and falls back to `exact()`.
template <class Decide, class Exact>
auto refine(Decide&& decide, Exact&& exact) {
  for (unsigned bits : kPrecisionLadder) {
    if (auto verdict = decide(bits)) return *verdict;
  }
  return exact();
}

}  // namespace detail

/// Exact sign of alpha_n - r.
inline int compare(const WeightSequence& seq, std::uint64_t n, const Rational& r) {
  if (seq.exact_only()) return detail::sign_of(seq(n) - r);
  return detail::refine(
      [&](unsigned bits) -> std::optional<int> {
        Enclosure e = seq.enclose(n, bits);
        if (e.hi < r) return -1;
        if (e.lo > r) return 1;
        if (e.exact()) return 0;
        return std::nullopt;
      },
      [&] { return detail::sign_of(seq(n) - r); });
}

/// Exact sign of alpha_i - alpha_j.
inline int compare(const WeightSequence& seq, std::uint64_t i, std::uint64_t j) {
  if (i == j) return 0;
  if (seq.exact_only()) return detail::sign_of(seq(i) - seq(j));
  return detail::refine(
      [&](unsigned bits) -> std::optional<int> {
        Enclosure a = seq.enclose(i, bits);
        Enclosure b = seq.enclose(j, bits);
        if (a.hi < b.lo) return -1;
        if (a.lo > b.hi) return 1;
        if (a.exact() && b.exact()) return detail::sign_of(a.lo - b.lo);
        return std::nullopt;
      },
      [&] { return detail::sign_of(seq(i) - seq(j)); });
}

/// Exact decision of |alpha_i - alpha_j| < r.
inline bool abs_difference_less(const WeightSequence& seq, std::uint64_t i, std::uint64_t j, const Rational& r) {
  if (i == j) return r > 0;
  if (seq.exact_only()) return abs(Rational(seq(i) - seq(j))) < r;
  return detail::refine(
      [&](unsigned bits) -> std::optional<bool> {
        Enclosure a = seq.enclose(i, bits);
        Enclosure b = seq.enclose(j, bits);
        Rational upper = std::max(Rational(a.hi - b.lo), Rational(b.hi - a.lo));
        if (upper < r) return true;
        Rational lower = std::max({Rational(a.lo - b.hi), Rational(b.lo - a.hi), Rational(0)});
        if (lower >= r) return false;
        return std::nullopt;
      },
      [&] { return abs(Rational(seq(i) - seq(j))) < r; });
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Kakutani weight alpha_n via the self-similar block recursion
/// W_{k+1} = W_k, 2^-k, W_k (W_1 = [1]); descends by index arithmetic.
inline Rational kakutani_recursive(std::uint64_t n) {
  if (n < 1) throw DomainError("kakutani_recursive: index must be >= 1");
  for (;;) {
    const unsigned k = static_cast<unsigned>(std::bit_width(n)) - 1;  // 2^k <= n < 2^{k+1}
    const std::uint64_t middle = std::uint64_t{1} << k;
    if (n == middle) return pow2_inverse(k);
    n -= middle;  // right copy of W_k
  }
}

/// Kakutani weight in closed form: 2^-v with v the 2-adic valuation of n.
inline Rational kakutani_closed(std::uint64_t n) {
  if (n < 1) throw DomainError("kakutani_closed: index must be >= 1");
  return pow2_inverse(static_cast<unsigned>(std::countr_zero(n)));
}

namespace detail {

/// Unrolls the perturbed recursion: alpha_n = 1/base + sum_{e in exponents} 3^-e.
struct ExampleChain {
  std::uint64_t base = 1;               // power of two reached at the end of the chain
  std::vector<std::uint64_t> exponents;  // strictly decreasing
};

inline ExampleChain example_chain(std::uint64_t n) {
  ExampleChain chain;
  while (!std::has_single_bit(n)) {
    const std::uint64_t top = std::bit_floor(n);
    const std::uint64_t j = n - top;  // 1 <= j < top
    chain.exponents.push_back(n);
    n = top - j;
  }
  chain.base = n;
  return chain;
}

/// 1/base + sum of 3^-e over exponents e <= cutoff, as one exact fraction.
inline Rational example_partial_sum(const ExampleChain& chain, std::uint64_t cutoff) {
  mpz_class numerator = 0;
  mpz_class term;
  for (std::uint64_t e : chain.exponents) {
    if (e > cutoff) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), 3, cutoff - e);
    numerator += term;
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 3, cutoff);
  Rational r;
  r.get_num() = scale + mpz_class(static_cast<unsigned long>(chain.base)) * numerator;
  r.get_den() = mpz_class(static_cast<unsigned long>(chain.base)) * scale;
  r.canonicalize();
  return r;
}

}  // namespace detail

/// The perturbed Kakutani sequence: alpha_{2^m} = 2^-m and
/// alpha_{2^m + j} = alpha_{2^m - j} + 3^-(2^m + j) for 1 <= j < 2^m.
inline Rational example_weights(std::uint64_t n) {
  if (n < 1) throw DomainError("example_weights: index must be >= 1");
  const auto chain = detail::example_chain(n);
  const std::uint64_t top = chain.exponents.empty() ? 0 : chain.exponents.front();
  return detail::example_partial_sum(chain, top);
}

/// Enclosure of example_weights(n) of width below 2^-bits. Exponents above
/// the cutoff L = bits are bounded by their geometric tail 3^-L / 2.
inline Enclosure example_weights_enclosure(std::uint64_t n, unsigned bits) {
  if (n < 1) throw DomainError("example_weights: index must be >= 1");
  const auto chain = detail::example_chain(n);
  const std::uint64_t cutoff = bits;
  const bool truncated = !chain.exponents.empty() && chain.exponents.front() > cutoff;
  if (!truncated) {
    Rational v = detail::example_partial_sum(chain, chain.exponents.empty() ? 0 : chain.exponents.front());
    return {v, v};
  }
  Rational lo = detail::example_partial_sum(chain, cutoff);
  Rational hi = lo + Rational(pow3_inverse(cutoff) / 2);
  return {std::move(lo), std::move(hi)};
}

inline WeightSequence kakutani_sequence() {
  return WeightSequence("kakutani", kakutani_recursive, nullptr, Rational(1));
}

inline WeightSequence example_sequence() {
  // The supremum is approached by alpha_{2^m - 1} but never attained.
  return WeightSequence("example", example_weights, example_weights_enclosure);
}

/// A finite sequence backed by explicit values.
inline WeightSequence sequence_from_values(std::string name, std::vector<Rational> values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < 0) throw DomainError(name + ": negative weight at index " + std::to_string(i + 1));
  auto shared = std::make_shared<const std::vector<Rational>>(std::move(values));
  const auto length = static_cast<std::uint64_t>(shared->size());
  return WeightSequence(
      std::move(name), [shared](std::uint64_t n) { return (*shared)[n - 1]; }, nullptr, std::nullopt, length);
}

/// Reads one rational per line ("p/q" or an integer). Blank lines and lines
/// starting with '#' are skipped.
inline std::vector<Rational> read_weights(std::istream& in) {
  std::vector<Rational> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      values.push_back(parse_rational(line));
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (values.back() < 0) throw DomainError("line " + std::to_string(line_no) + ": negative weight");
  }
  return values;
}

inline void write_weights(std::ostream& out, std::span<const Rational> weights) {
  for (const auto& w : weights) out << to_string(w) << '\n';
}

inline WeightSequence load_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open weight file '" + path + "'");
  return sequence_from_values("file:" + path, read_weights(in));
}

/// Resolves "kakutani", "example" or "file:<path>".
inline WeightSequence sequence_by_name(const std::string& name) {
  if (name == "kakutani") return kakutani_sequence();
  if (name == "example") return example_sequence();
  if (name.rfind("file:", 0) == 0) return load_weight_file(name.substr(5));
  throw DomainError("unknown sequence '" + name + "' (expected kakutani, example or file:<path>)");
}

/// Non-owning handle to one weight: alpha_index of `seq`, or the literal zero
/// when `seq` is null. The referenced sequence must outlive the handle.
struct WeightRef {
  const WeightSequence* seq = nullptr;
  std::uint64_t index = 0;

  static WeightRef zero() { return {}; }
  bool literal_zero() const { return seq == nullptr; }
  Rational value() const { return literal_zero() ? Rational(0) : (*seq)(index); }
  Enclosure enclose(unsigned bits) const {
    if (literal_zero()) return {Rational(0), Rational(0)};
    return seq->enclose(index, bits);
  }
};

inline bool weight_is_zero(const WeightRef& w) { return w.literal_zero() || compare(*w.seq, w.index, Rational(0)) == 0; }
inline bool weight_is_negative(const WeightRef&) { return false; }  // sequences are nonnegative

inline bool weights_equal(const WeightRef& a, const WeightRef& b) {
  if (a.literal_zero() || b.literal_zero()) return weight_is_zero(a) && weight_is_zero(b);
  if (a.seq == b.seq) return compare(*a.seq, a.index, b.index) == 0;
  return a.value() == b.value();
}

inline std::string to_string(const WeightRef& w) {
  return w.literal_zero() ? std::string("0") : "alpha_" + std::to_string(w.index);
}

/// Handles to alpha_1 .. alpha_count.
inline std::vector<WeightRef> prefix_refs(const WeightSequence& seq, std::uint64_t count) {
  std::vector<WeightRef> out(count);
  for (std::uint64_t n = 1; n <= count; ++n) out[n - 1] = {&seq, n};
  return out;
}

/// alpha_1 .. alpha_count, exactly.
inline std::vector<Rational> prefix(const WeightSequence& seq, std::uint64_t count) {
  std::vector<Rational> out;
  out.reserve(count);
  for (std::uint64_t n = 1; n <= count; ++n) out.push_back(seq(n));
  return out;
}

// ---------------------------------------------------------------------------
// Analyses
// ---------------------------------------------------------------------------

struct DistinctResult {
  bool distinct = true;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;  // first colliding pair
};

/// Whether alpha_1 .. alpha_prefix_len are pairwise distinct (exact).
inline DistinctResult check_distinct(const WeightSequence& seq, std::uint64_t prefix_len) {
  if (prefix_len < 1) throw DomainError("check_distinct: prefix length must be >= 1");
  std::vector<Rational> values = prefix(seq, prefix_len);
  std::vector<std::uint64_t> order(prefix_len);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

  // Within a run of equal values the stable sort keeps indices ascending, so
  // each run contributes (first, second); the smallest such pair wins.
  DistinctResult result;
  for (std::size_t i = 0; i + 1 < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    if (j - i > 1) {
      std::pair<std::uint64_t, std::uint64_t> pair{order[i] + 1, order[i + 1] + 1};
      if (!result.witness || pair < *result.witness) result.witness = pair;
      result.distinct = false;
    }
    i = j;
  }
  return result;
}

struct CorollaryRow {
  unsigned n = 0;
  Rational alpha_pow2;  // alpha_{2^n}
  Rational symmetry_defect;  // sup_{1 <= k < 2^n} |alpha_k - alpha_{2^n - k}|
};

/// Both decay quantities of the perturbed-Kakutani criterion for n = 1..max_n.
/// `max_index` caps 2^n; exceeding it raises ResourceError carrying the last
/// completed n.
inline std::vector<CorollaryRow> corollary_check(const WeightSequence& seq, unsigned max_n,
                                                 std::uint64_t max_index = std::uint64_t{1} << 24) {
  if (max_n < 1) throw DomainError("corollary_check: max_n must be >= 1");
  std::vector<CorollaryRow> rows;
  std::vector<Rational> values;  // values[k-1] = alpha_k, grown on demand
  for (unsigned n = 1; n <= max_n; ++n) {
    if (n >= 63 || (std::uint64_t{1} << n) > max_index || !seq.has_index(std::uint64_t{1} << n))
      throw ResourceError("corollary_check: index 2^" + std::to_string(n) + " exceeds the available range",
                          n - 1);
    const std::uint64_t top = std::uint64_t{1} << n;
    while (values.size() < top) values.push_back(seq(values.size() + 1));
    CorollaryRow row;
    row.n = n;
    row.alpha_pow2 = values[top - 1];
    row.symmetry_defect = 0;
    for (std::uint64_t k = 1; k <= top / 2; ++k) {
      Rational d = abs(Rational(values[k - 1] - values[top - k - 1]));
      if (d > row.symmetry_defect) row.symmetry_defect = d;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Exact count of each distinct value among alpha_1 .. alpha_prefix_len.
inline std::map<Rational, std::uint64_t> value_multiplicities(const WeightSequence& seq, std::uint64_t prefix_len) {
  std::map<Rational, std::uint64_t> counts;
  for (std::uint64_t n = 1; n <= prefix_len; ++n) ++counts[seq(n)];
  return counts;
}

struct Cluster {
  double center = 0;  // mean of members
  double lo = 0;
  double hi = 0;
  std::uint64_t multiplicity = 0;       // members among the whole prefix
  std::uint64_t multiplicity_half = 0;  // members among the first prefix/2 terms
  std::uint64_t multiplicity_even = 0;  // members among the first 2*(prefix/2) terms
  bool accumulating = false;
};

struct AccumulationReport {
  std::vector<Cluster> clusters;  // ascending by center
  std::uint64_t prefix_len = 0;
  double tolerance = 0;
};

/// Single-linkage clustering of the weight values with gap threshold `tol`.
/// A cluster is flagged accumulating when it gains members between the
/// prefixes L and 2L, L = prefix_len / 2.
inline AccumulationReport accumulation_analysis(const WeightSequence& seq, std::uint64_t prefix_len, double tol) {
  if (!(tol > 0)) throw DomainError("accumulation_analysis: tolerance must be positive");
  if (prefix_len < 2) throw DomainError("accumulation_analysis: prefix length must be >= 2");

  struct Sample {
    double value;
    std::uint64_t index;
  };
  std::vector<Sample> samples;
  samples.reserve(prefix_len);
  for (std::uint64_t n = 1; n <= prefix_len; ++n) {
    Enclosure e = seq.enclose(n, kPrecisionLadder.front());
    samples.push_back({Rational((e.lo + e.hi) / 2).get_d(), n});
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  });

  const std::uint64_t half = prefix_len / 2;
  AccumulationReport report{{}, prefix_len, tol};
  double sum = 0;
  auto close = [&](Cluster& c) {
    c.center = sum / static_cast<double>(c.multiplicity);
    c.accumulating = c.multiplicity_even > c.multiplicity_half;
    report.clusters.push_back(c);
  };
  Cluster current;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (i > 0 && s.value - samples[i - 1].value > tol) {
      close(current);
      current = Cluster{};
      sum = 0;
    }
    if (current.multiplicity == 0) current.lo = s.value;
    current.hi = s.value;
    ++current.multiplicity;
    sum += s.value;
    if (s.index <= half) ++current.multiplicity_half;
    if (s.index <= 2 * half) ++current.multiplicity_even;
  }
  close(current);
  return report;
}

}  // namespace cso
