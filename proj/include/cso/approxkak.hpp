#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cso/errors.hpp"
#include "cso/rational.hpp"
#include "cso/shiftcore.hpp"
#include "cso/weightgen.hpp"

namespace cso {

// ---------------------------------------------------------------------------
// Index oracles
// ---------------------------------------------------------------------------

enum class OracleProvenance { exact_kakutani, scan, user };

inline const char* to_string(OracleProvenance p) {
  switch (p) {
    case OracleProvenance::exact_kakutani: return "exact_kakutani";
    case OracleProvenance::scan: return "scan";
    case OracleProvenance::user: return "user";
  }
  return "user";
}

/// Answers (n, eps) with an index c >= n such that 0 < alpha_c < eps and
/// |alpha_k - alpha_{c-k}| < eps for 1 <= k <= n. Answers are re-verified by
/// the plan builder, so a user oracle only needs to be honest, not trusted.
struct COracle {
  std::function<std::uint64_t(std::uint64_t, const Rational&)> query;
  OracleProvenance provenance = OracleProvenance::user;
};

/// Describes the first way `c` fails the oracle contract for (n, eps), if any.
inline std::optional<std::string> oracle_contract_violation(const WeightSequence& seq, std::uint64_t n,
                                                            const Rational& eps, std::uint64_t c) {
  const std::string at = " (n = " + std::to_string(n) + ", c = " + std::to_string(c) + ")";
  if (c < n) return "c < n" + at;
  if (!seq.has_index(c)) return "c outside the sequence" + at;
  if (compare(seq, c, Rational(0)) <= 0) return "alpha_c > 0 fails" + at;
  if (compare(seq, c, eps) >= 0) return "alpha_c < eps fails" + at;
  for (std::uint64_t k = 1; k <= n; ++k) {
    if (c - k < 1) return "alpha_{c-k} undefined at k = " + std::to_string(k) + at;
    if (!abs_difference_less(seq, k, c - k, eps))
      return "|alpha_k - alpha_{c-k}| < eps fails at k = " + std::to_string(k) + at;
  }
  return std::nullopt;
}

/// Smallest power of two c = 2^m with c > n and 2^-m < eps.
inline std::uint64_t kakutani_oracle(std::uint64_t n, const Rational& eps) {
  if (eps <= 0) throw DomainError("kakutani_oracle: eps must be positive");
  for (unsigned m = 0; m < 64; ++m) {
    const std::uint64_t c = std::uint64_t{1} << m;
    if (c > n && pow2_inverse(m) < eps) return c;
  }
  throw SearchExhausted("kakutani_oracle: no power of two below 2^64 fits (n, eps)", 0, "index overflow");
}

/// First c in [max(n, 2), search_limit] meeting the oracle contract.
inline std::uint64_t scan_oracle(const WeightSequence& seq, std::uint64_t n, const Rational& eps,
                                 std::uint64_t search_limit) {
  if (eps <= 0) throw DomainError("scan_oracle: eps must be positive");
  if (search_limit < n) throw DomainError("scan_oracle: search_limit must be >= n");
  std::uint64_t last = search_limit;
  if (auto len = seq.length()) last = std::min(last, *len);

  std::optional<std::uint64_t> near_miss;
  std::string near_reason;
  std::uint64_t smallest_index = 0;
  double smallest_value = std::numeric_limits<double>::infinity();
  const Rational zero(0);
  for (std::uint64_t c = std::max<std::uint64_t>(n, 2); c <= last; ++c) {
    const Enclosure e = seq.enclose(c, kPrecisionLadder.front());
    if (const double v = e.lo.get_d(); v < smallest_value) {
      smallest_value = v;
      smallest_index = c;
    }
    if (e.lo >= eps) continue;  // cheap rejection at working precision
    if (compare(seq, c, zero) <= 0 || compare(seq, c, eps) >= 0) continue;
    auto violation = oracle_contract_violation(seq, n, eps, c);
    if (!violation) return c;
    if (!near_miss) {
      near_miss = c;
      near_reason = *violation;
    }
  }
  if (near_miss)
    throw SearchExhausted("scan_oracle: no valid index up to " + std::to_string(last), *near_miss, near_reason);
  throw SearchExhausted("scan_oracle: alpha_c < eps never holds up to " + std::to_string(last), smallest_index,
                        "smallest weight seen");
}

inline COracle make_kakutani_oracle() { return {kakutani_oracle, OracleProvenance::exact_kakutani}; }

/// Scan oracle bound to a sequence (captured by value).
inline COracle make_scan_oracle(const WeightSequence& seq, std::uint64_t search_limit) {
  return {[seq, search_limit](std::uint64_t n, const Rational& eps) {
            return scan_oracle(seq, n, eps, std::max(search_limit, n));
          },
          OracleProvenance::scan};
}

// ---------------------------------------------------------------------------
// Index plan
// ---------------------------------------------------------------------------

/// The indices m_{-1}, m_0, ..., m_{2K+1} at which weights are zeroed, with
/// the tolerances delta_k and oracle answers c_k of each round.
struct IndexPlan {
  Rational eps;
  std::uint64_t N = 0;
  std::vector<std::uint64_t> marks;  // marks[k + 1] = m_k
  std::vector<Rational> delta;       // delta_0 .. delta_{K-1}
  std::vector<std::uint64_t> oracle_index;  // c_k = c_{3 m_{2k}, delta_k}

  std::uint64_t m(int k) const { return marks.at(static_cast<std::size_t>(k + 1)); }
  unsigned rounds() const { return static_cast<unsigned>(delta.size()); }
  int last_mark() const { return 2 * static_cast<int>(rounds()) + 1; }
  std::uint64_t horizon() const { return m(last_mark()); }
};

struct PlanOptions {
  std::uint64_t n_search_cap = 10'000'000;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw ResourceError("index arithmetic overflows 64 bits", 0);
  return a * b;
}

}  // namespace detail

/// Runs the index recursion for K rounds:
///   m_{-1} = 0, m_0 = m_1 = N (first index with 0 < alpha_N < eps/4),
///   delta_k = min(alpha_1..alpha_{3 m_{2k}}, eps / 2^k) / 8,
///   m_{2k+3} = c_{3 m_{2k}, delta_k} - m_{2k-1},
///   m_{2k+2} = m_{2k+3} - m_{2k} + m_{2k-1}.
inline IndexPlan build_plan(const COracle& oracle, const WeightSequence& seq, const Rational& eps, unsigned rounds,
                            const PlanOptions& options = {}) {
  if (eps <= 0) throw DomainError("build_plan: eps must be positive");
  if (rounds < 1) throw DomainError("build_plan: at least one round is required");
  const Rational zero(0);

  IndexPlan plan;
  plan.eps = eps;
  const Rational quarter = eps / 4;
  for (std::uint64_t n = 1; n <= options.n_search_cap && seq.has_index(n); ++n) {
    if (compare(seq, n, zero) == 0)
      throw DomainError("build_plan: alpha_" + std::to_string(n) + " = 0, the shift is not irreducible");
    if (compare(seq, n, quarter) < 0) {
      plan.N = n;
      break;
    }
  }
  if (plan.N == 0)
    throw SearchExhausted("build_plan: no N with alpha_N < eps/4 up to " + std::to_string(options.n_search_cap), 0,
                          "search cap");

  plan.marks = {0, plan.N, plan.N};
  std::uint64_t scanned = 0;
  std::uint64_t argmin = 1;
  for (unsigned k = 0; k < rounds; ++k) {
    const std::uint64_t m_even = plan.m(2 * static_cast<int>(k));
    const std::uint64_t m_odd_prev = plan.m(2 * static_cast<int>(k) - 1);
    const std::uint64_t n = detail::checked_mul(3, m_even);
    for (std::uint64_t j = scanned + 1; j <= n; ++j) {
      if (!seq.has_index(j))
        throw SearchExhausted("build_plan: sequence ends before index " + std::to_string(n), j - 1, "sequence length");
      if (compare(seq, j, zero) == 0)
        throw DomainError("build_plan: alpha_" + std::to_string(j) + " = 0, the shift is not irreducible");
      if (compare(seq, j, argmin) < 0) argmin = j;
    }
    scanned = std::max(scanned, n);

    Rational floor = seq(argmin);
    const Rational cap = eps / Rational(mpz_class(1) << k);
    Rational delta = std::min(floor, cap) / 8;

    const std::uint64_t c = oracle.query(n, delta);
    if (auto violation = oracle_contract_violation(seq, n, delta, c))
      throw ContractViolation("build_plan: round " + std::to_string(k) + " oracle answer violates the contract: " +
                              *violation);
    if (c <= m_odd_prev) throw ConsistencyError("build_plan: oracle answer does not exceed m_{2k-1}");
    const std::uint64_t odd = c - m_odd_prev;
    if (odd + m_odd_prev < m_even) throw ConsistencyError("build_plan: m_{2k+2} would be negative");
    const std::uint64_t even = odd - m_even + m_odd_prev;
    plan.marks.push_back(even);  // m_{2k+2}
    plan.marks.push_back(odd);   // m_{2k+3}
    plan.delta.push_back(std::move(delta));
    plan.oracle_index.push_back(c);
  }

  for (int k = 1; k < plan.last_mark(); ++k)
    if (!(plan.m(k) < plan.m(k + 1)))
      throw ConsistencyError("build_plan: marks not strictly increasing at m_" + std::to_string(k) + " = " +
                             std::to_string(plan.m(k)) + ", m_" + std::to_string(k + 1) + " = " +
                             std::to_string(plan.m(k + 1)));
  return plan;
}

// ---------------------------------------------------------------------------
// T', its blocks, and the complex symmetric approximant T''
// ---------------------------------------------------------------------------

/// beta_i = alpha_i except beta_{m_k} = 0, over 1 .. m_{2K+1}.
inline std::vector<WeightRef> build_t_prime(const WeightSequence& seq, const IndexPlan& plan) {
  const std::uint64_t horizon = plan.horizon();
  if (!seq.has_index(horizon)) throw DomainError("build_t_prime: sequence shorter than the plan horizon");
  std::vector<WeightRef> beta = prefix_refs(seq, horizon);
  for (int k = 0; k <= plan.last_mark(); ++k) beta[plan.m(k) - 1] = WeightRef::zero();
  return beta;
}

/// A_k: the weights alpha_{first} .. alpha_{last - 1} (first = 1 for A_0 = A_1,
/// m_{k-1} + 1 otherwise), read backwards when
/// reversed (A'_k). Its dimension is last - first + 1.
struct BlockSpan {
  int k = 0;
  std::uint64_t first = 0;
  std::uint64_t last = 0;  // one past the final weight; the zeroed mark m_k
  bool reversed = false;

  std::size_t dimension() const { return static_cast<std::size_t>(last - first + 1); }

  BlockSpan reverse() const { return {k, first, last, !reversed}; }

  /// Source index of the l-th subdiagonal weight, l = 1 .. dimension - 1.
  std::uint64_t source(std::uint64_t l) const { return reversed ? last - l : first + l - 1; }

  std::vector<WeightRef> weights(const WeightSequence& seq) const {
    std::vector<WeightRef> out;
    out.reserve(dimension() - 1);
    for (std::uint64_t l = 1; l < dimension(); ++l) out.push_back({&seq, source(l)});
    return out;
  }
};

/// T' = A_1 + A_2 + ... (direct sum), with A_0 := A_1 at position 0.
struct ShiftBlocks {
  const WeightSequence* seq = nullptr;
  std::vector<BlockSpan> blocks;  // blocks[k] = A_k, k = 0 .. 2K+1
  unsigned rounds = 0;

  const BlockSpan& operator[](int k) const { return blocks.at(static_cast<std::size_t>(k)); }
};

inline ShiftBlocks build_blocks(const WeightSequence& seq, std::span<const WeightRef> beta, const IndexPlan& plan) {
  if (beta.size() != plan.horizon()) throw ConsistencyError("build_blocks: T' does not cover the plan horizon");
  ShiftBlocks out{&seq, {}, plan.rounds()};
  out.blocks.push_back({0, 1, plan.m(1), false});
  for (int k = 1; k <= plan.last_mark(); ++k) {
    const std::uint64_t first = k == 1 ? 1 : plan.m(k - 1) + 1;
    const std::uint64_t last = plan.m(k);
    out.blocks.push_back({k, first, last, false});
    if (!beta[last - 1].literal_zero())
      throw ConsistencyError("build_blocks: beta is not zero at m_" + std::to_string(k));
    for (std::uint64_t i = first; i < last; ++i)
      if (beta[i - 1].literal_zero() || beta[i - 1].index != i)
        throw ConsistencyError("build_blocks: beta differs from alpha inside A_" + std::to_string(k));
  }
  for (unsigned k = 0; k < plan.rounds(); ++k) {
    const int odd = 2 * static_cast<int>(k) + 3;
    const int even = 2 * static_cast<int>(k);
    if (out[odd].dimension() != out[even].dimension())
      throw ConsistencyError("build_blocks: size(A_" + std::to_string(odd) + ") != size(A_" + std::to_string(even) +
                             ")");
  }
  return out;
}

/// T'' over the plan horizon, and the paired view in which it is visibly
/// complex symmetric.
struct DoublePrime {
  /// Flattened weights of T'' = A'_3 + (A_j for odd j, A'_{j+3} for even j).
  /// The slot of A_{2K} keeps A_{2K}: its partner A'_{2K+3} lies past the horizon.
  std::vector<WeightRef> weights;
  /// S'' = sum over k < K of the pair units A_{2k+3} + A'_{2k+3}. Each unit is
  /// listed as a single block whose middle weight is the zero joining the two
  /// halves; units are separated by zeros.
  BlockDecomposition<WeightRef> paired;
  int tail_slot = 0;
};

inline DoublePrime assemble_t_double_prime(const ShiftBlocks& blocks) {
  if (!blocks.seq) throw DomainError("assemble_t_double_prime: blocks are not bound to a sequence");
  const WeightSequence& seq = *blocks.seq;
  const int top = 2 * static_cast<int>(blocks.rounds) + 1;
  DoublePrime out;
  out.tail_slot = top - 1;

  for (int j = 1; j <= top; ++j) {
    BlockSpan content = blocks[j];
    if (j == 1) content = blocks[3].reverse();
    else if (j % 2 == 0 && j + 3 <= top) content = blocks[j + 3].reverse();
    if (content.dimension() != blocks[j].dimension())
      throw ConsistencyError("assemble_t_double_prime: slot " + std::to_string(j) + " size mismatch");
    const auto w = content.weights(seq);
    out.weights.insert(out.weights.end(), w.begin(), w.end());
    out.weights.push_back(WeightRef::zero());
  }

  std::uint64_t position = 0;
  for (unsigned k = 0; k < blocks.rounds; ++k) {
    const BlockSpan& a = blocks[2 * static_cast<int>(k) + 3];
    FiniteShiftBlock<WeightRef> unit;
    unit.weights = a.weights(seq);
    unit.weights.push_back(WeightRef::zero());
    const auto rev = a.reverse().weights(seq);
    unit.weights.insert(unit.weights.end(), rev.begin(), rev.end());
    if (k > 0) out.paired.zero_positions.push_back(position);
    position += unit.weights.size() + 1;
    out.paired.blocks.push_back(std::move(unit));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certified bounds
// ---------------------------------------------------------------------------

namespace detail {

inline bool same_weight(const WeightRef& a, const WeightRef& b) {
  if (a.literal_zero() || b.literal_zero()) return a.literal_zero() && b.literal_zero();
  return a.seq == b.seq && a.index == b.index;
}

}  // namespace detail

/// Upper bound on sup |a - b| over the pairs produced by `for_each_pair`.
/// Works up the precision ladder and stops at the first level where the
/// bound is below `threshold` (or every enclosure is exact); the final
/// fallback is the exact supremum. Deterministic for a fixed pair set.
template <class ForEachPair>
CertifiedBound certified_sup(ForEachPair&& for_each_pair, const Rational& threshold) {
  for (unsigned bits : kPrecisionLadder) {
    Rational best = 0;
    bool exact = true;
    for_each_pair([&](const WeightRef& a, const WeightRef& b) {
      if (detail::same_weight(a, b)) return;
      const Enclosure ea = a.enclose(bits);
      const Enclosure eb = b.enclose(bits);
      exact = exact && ea.exact() && eb.exact();
      Rational up = ea.hi - eb.lo;
      if (Rational other = eb.hi - ea.lo; other > up) up = std::move(other);
      if (up > best) best = std::move(up);
    });
    if (exact || best < threshold) return {best, exact};
  }
  Rational best = 0;
  for_each_pair([&](const WeightRef& a, const WeightRef& b) {
    if (detail::same_weight(a, b)) return;
    Rational d = abs(Rational(a.value() - b.value()));
    if (d > best) best = std::move(d);
  });
  return {best, true};
}

/// Sup of |x_i - y_i| over two equal-length lazy weight lists.
inline CertifiedBound certified_distance(std::span<const WeightRef> x, std::span<const WeightRef> y,
                                         const Rational& threshold) {
  if (x.size() != y.size()) throw DomainError("certified_distance: length mismatch");
  return certified_sup(
      [&](auto&& visit) {
        for (std::size_t i = 0; i < x.size(); ++i) visit(x[i], y[i]);
      },
      threshold);
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct ZeroedWeight {
  int k = 0;
  std::uint64_t index = 0;  // m_k
  CertifiedBound bound;      // upper bound on alpha_{m_k}
};

struct PairBound {
  unsigned k = 0;
  CertifiedBound bound;  // upper bound on ||A'_{2k+3} - A_{2k}||
};

/// Machine-checkable record that T'' is complex symmetric and within eps of
/// T on the prefix 1 .. verified_prefix.
struct ApproxCertificate {
  std::string sequence;
  OracleProvenance oracle = OracleProvenance::user;
  Rational eps;
  IndexPlan plan;
  std::vector<ZeroedWeight> zeroed_weights;
  std::vector<PairBound> pair_bounds;
  CertifiedBound t_prime_distance;         // ||T - T'|| on the prefix
  CertifiedBound t_double_prime_distance;  // ||T' - T''|| on the prefix
  CertifiedBound prefix_distance;          // ||T - T''|| on the prefix
  std::uint64_t verified_prefix = 0;
  int tail_slot = 0;
  bool exactly_verified = true;
};

struct CertifyOptions {
  PlanOptions plan;
  std::uint64_t max_prefix = std::uint64_t{1} << 23;
};

namespace detail {

inline Rational half_of(const Rational& eps) { return eps / 2; }

/// Pairs (alpha_{m_{2k+3} - l}, alpha_{m_{2k-1} + l}) compared by A'_{2k+3} vs A_{2k}.
inline auto pair_visitor(const WeightSequence& seq, const IndexPlan& plan, unsigned k) {
  const int i = static_cast<int>(k);
  const std::uint64_t hi = plan.m(2 * i + 3);
  const std::uint64_t lo = plan.m(2 * i - 1);
  const std::uint64_t count = plan.m(2 * i) - lo;  // dimension of A_{2k}
  return [&seq, hi, lo, count](auto&& visit) {
    for (std::uint64_t l = 1; l < count; ++l) visit(WeightRef{&seq, hi - l}, WeightRef{&seq, lo + l});
  };
}

}  // namespace detail

/// Runs plan -> T' -> blocks -> T'' and checks every inequality of the
/// construction; throws VerificationFailure with diagnostics on violation.
inline ApproxCertificate certify(const WeightSequence& seq, const Rational& eps, unsigned rounds,
                                 const COracle& oracle, const CertifyOptions& options = {}) {
  IndexPlan plan = build_plan(oracle, seq, eps, rounds, options.plan);
  if (plan.horizon() > options.max_prefix)
    throw ResourceError("certify: horizon m_" + std::to_string(plan.last_mark()) + " = " +
                            std::to_string(plan.horizon()) + " exceeds max_prefix " +
                            std::to_string(options.max_prefix),
                        plan.horizon());

  const std::vector<WeightRef> t_prime = build_t_prime(seq, plan);
  const ShiftBlocks blocks = build_blocks(seq, t_prime, plan);
  const DoublePrime t_double_prime = assemble_t_double_prime(blocks);
  const std::vector<WeightRef> original = prefix_refs(seq, plan.horizon());

  ApproxCertificate cert;
  cert.sequence = seq.name();
  cert.oracle = oracle.provenance;
  cert.eps = eps;
  cert.verified_prefix = plan.horizon();
  cert.tail_slot = t_double_prime.tail_slot;

  std::vector<std::string> failures;
  const Rational half = detail::half_of(eps);
  const Rational zero(0);
  for (int k = 0; k <= plan.last_mark(); ++k) {
    const WeightRef w{&seq, plan.m(k)};
    ZeroedWeight z{k, plan.m(k), certified_sup([&](auto&& visit) { visit(w, WeightRef::zero()); }, half)};
    if (compare(seq, plan.m(k), zero) <= 0) failures.push_back("alpha_{m_" + std::to_string(k) + "} is not positive");
    if (!(z.bound.value < half)) failures.push_back("alpha_{m_" + std::to_string(k) + "} >= eps/2");
    cert.zeroed_weights.push_back(std::move(z));
  }
  for (unsigned k = 0; k < plan.rounds(); ++k) {
    PairBound p{k, certified_sup(detail::pair_visitor(seq, plan, k), half)};
    if (!(p.bound.value < half))
      failures.push_back("||A'_" + std::to_string(2 * k + 3) + " - A_" + std::to_string(2 * k) + "|| >= eps/2");
    cert.pair_bounds.push_back(std::move(p));
  }
  cert.t_prime_distance = certified_distance(original, t_prime, half);
  cert.t_double_prime_distance = certified_distance(t_prime, t_double_prime.weights, half);
  cert.prefix_distance = certified_distance(original, t_double_prime.weights, eps);
  if (!(cert.t_prime_distance.value < half)) failures.push_back("||T - T'|| >= eps/2");
  if (!(cert.t_double_prime_distance.value < half)) failures.push_back("||T' - T''|| >= eps/2");
  if (!(cert.prefix_distance.value < eps)) failures.push_back("||T - T''|| >= eps");
  if (!is_cso_truncation(t_double_prime.paired)) failures.push_back("paired view of T'' is not palindromic");

  if (!failures.empty()) {
    std::string msg = "certify: construction failed:";
    for (const auto& f : failures) msg += "\n  - " + f;
    throw VerificationFailure(msg);
  }

  auto all_exact = [&] {
    for (const auto& z : cert.zeroed_weights)
      if (!z.bound.exact) return false;
    for (const auto& p : cert.pair_bounds)
      if (!p.bound.exact) return false;
    return cert.t_prime_distance.exact && cert.t_double_prime_distance.exact && cert.prefix_distance.exact;
  };
  cert.exactly_verified = all_exact();
  cert.plan = std::move(plan);
  return cert;
}

// ---------------------------------------------------------------------------
// Independent verification
// ---------------------------------------------------------------------------

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string what) {
    ok = false;
    failures.push_back(std::move(what));
  }
};

namespace detail {

/// Source weight of T'' at position i (1-based), derived directly from the
/// marks: zero at every m_k; slot 1 reads A'_3; an even slot j < 2K reads
/// A'_{j+3}; everything else reads alpha_i.
inline std::uint64_t double_prime_source(const std::vector<std::uint64_t>& marks, unsigned rounds, std::uint64_t i) {
  // marks[s] = m_{s-1}; slot j covers (m_{j-1}, m_j].
  const auto it = std::lower_bound(marks.begin() + 1, marks.end(), i);
  const auto s = static_cast<std::size_t>(it - marks.begin());
  if (it != marks.end() && *it == i) return 0;
  int slot = static_cast<int>(s) - 1;
  if (slot == 0) slot = 1;  // m_0 = m_1, and A_1 starts at index 1
  const std::uint64_t start = slot == 1 ? 0 : marks[static_cast<std::size_t>(slot)];  // m_{slot-1}
  const std::uint64_t offset = i - start;
  const int top = 2 * static_cast<int>(rounds) + 1;
  int partner = 0;
  if (slot == 1) partner = 3;
  else if (slot % 2 == 0 && slot + 3 <= top) partner = slot + 3;
  if (partner == 0) return i;
  return marks[static_cast<std::size_t>(partner) + 1] - offset;  // alpha_{m_partner - l}
}

}  // namespace detail

/// Re-derives every quantity of `cert` from raw weights without reusing the
/// block-assembly path and compares it with the recorded value.
inline VerificationReport verify(const WeightSequence& seq, const ApproxCertificate& cert) {
  VerificationReport r;
  const IndexPlan& plan = cert.plan;
  const Rational& eps = cert.eps;
  const Rational zero(0);
  if (eps <= 0) {
    r.fail("eps is not positive");
    return r;
  }
  if (plan.eps != eps) r.fail("plan eps differs from certificate eps");
  const unsigned rounds = plan.rounds();
  if (rounds < 1 || plan.marks.size() != 2 * rounds + 3 || plan.oracle_index.size() != rounds) {
    r.fail("plan has inconsistent lengths");
    return r;
  }
  if (plan.m(-1) != 0) r.fail("m_{-1} != 0");
  if (plan.m(0) != plan.N || plan.m(1) != plan.N) r.fail("m_0 = m_1 = N fails");
  for (int k = 1; k < plan.last_mark(); ++k)
    if (!(plan.m(k) < plan.m(k + 1))) r.fail("marks not strictly increasing at k = " + std::to_string(k));
  if (!r.ok) return r;
  if (cert.verified_prefix != plan.horizon()) r.fail("verified_prefix != m_{2K+1}");
  if (!seq.has_index(plan.horizon())) {
    r.fail("sequence shorter than the horizon");
    return r;
  }

  // N is the first index with alpha_N < eps/4.
  const Rational quarter = eps / 4;
  if (plan.N < 1 || compare(seq, plan.N, quarter) >= 0 || compare(seq, plan.N, zero) <= 0)
    r.fail("0 < alpha_N < eps/4 fails");
  for (std::uint64_t n = 1; n < plan.N && r.ok; ++n)
    if (compare(seq, n, quarter) < 0) r.fail("N is not the first index with alpha_N < eps/4");

  for (unsigned k = 0; k < rounds; ++k) {
    const int i = static_cast<int>(k);
    const std::uint64_t n = 3 * plan.m(2 * i);
    Rational floor = eps / Rational(mpz_class(1) << k);
    if (!seq.has_index(n)) {
      r.fail("sequence shorter than 3 m_" + std::to_string(2 * i));
      continue;
    }
    for (std::uint64_t j = 1; j <= n; ++j)
      if (compare(seq, j, floor) < 0) floor = seq(j);
    const Rational delta = floor / 8;
    if (plan.delta[k] != delta) r.fail("delta_" + std::to_string(k) + " does not match its recomputation");
    const std::uint64_t c = plan.m(2 * i + 3) + plan.m(2 * i - 1);
    if (plan.oracle_index[k] != c) r.fail("c_" + std::to_string(k) + " != m_{2k+3} + m_{2k-1}");
    if (plan.m(2 * i + 2) + plan.m(2 * i) != c) r.fail("m_{2k+2} + m_{2k} != m_{2k+3} + m_{2k-1} at k = " + std::to_string(k));
    if (2 * plan.m(2 * i) > plan.m(2 * i + 2)) r.fail("2 m_{2k} <= m_{2k+2} fails at k = " + std::to_string(k));
    if (auto v = oracle_contract_violation(seq, n, delta, c)) r.fail("round " + std::to_string(k) + ": " + *v);
  }
  if (!r.ok) return r;

  const Rational half = eps / 2;
  if (cert.zeroed_weights.size() != static_cast<std::size_t>(plan.last_mark() + 1)) r.fail("zeroed weight count");
  for (std::size_t s = 0; s < cert.zeroed_weights.size() && s <= static_cast<std::size_t>(plan.last_mark()); ++s) {
    const auto& z = cert.zeroed_weights[s];
    const int k = static_cast<int>(s);
    const std::uint64_t idx = plan.m(k);
    const CertifiedBound b = certified_sup([&](auto&& visit) { visit(WeightRef{&seq, idx}, WeightRef::zero()); }, half);
    if (z.k != k || z.index != idx) r.fail("zeroed weight " + std::to_string(k) + " has the wrong index");
    if (!(z.bound == b)) r.fail("zeroed weight bound at m_" + std::to_string(k) + " does not match");
    if (!(b.value < half) || compare(seq, idx, zero) <= 0) r.fail("0 < alpha_{m_" + std::to_string(k) + "} < eps/2 fails");
  }

  // Pair bounds, enumerated position by position through T''.
  const std::vector<std::uint64_t>& marks = plan.marks;
  if (cert.pair_bounds.size() != rounds) r.fail("pair bound count");
  for (unsigned k = 0; k < rounds && k < cert.pair_bounds.size(); ++k) {
    const int i = static_cast<int>(k);
    const std::uint64_t begin = plan.m(2 * i - 1) + 1;
    const std::uint64_t end = plan.m(2 * i);
    const CertifiedBound b = certified_sup(
        [&](auto&& visit) {
          for (std::uint64_t p = begin; p < end; ++p) {
            const std::uint64_t src = detail::double_prime_source(marks, rounds, p);
            visit(WeightRef{&seq, p}, src == 0 ? WeightRef::zero() : WeightRef{&seq, src});
          }
        },
        half);
    if (cert.pair_bounds[k].k != k || !(cert.pair_bounds[k].bound == b))
      r.fail("pair bound " + std::to_string(k) + " does not match");
    if (!(b.value < half)) r.fail("||A'_{2k+3} - A_{2k}|| < eps/2 fails at k = " + std::to_string(k));
  }

  auto source_ref = [&](std::uint64_t p) {
    const std::uint64_t src = detail::double_prime_source(marks, rounds, p);
    return src == 0 ? WeightRef::zero() : WeightRef{&seq, src};
  };
  auto is_mark = [&](std::uint64_t p) { return std::binary_search(marks.begin() + 1, marks.end(), p); };
  const std::uint64_t horizon = plan.horizon();
  const CertifiedBound t1 = certified_sup(
      [&](auto&& visit) {
        for (std::uint64_t p = 1; p <= horizon; ++p)
          if (is_mark(p)) visit(WeightRef{&seq, p}, WeightRef::zero());
      },
      half);
  const CertifiedBound t2 = certified_sup(
      [&](auto&& visit) {
        for (std::uint64_t p = 1; p <= horizon; ++p) {
          const WeightRef prime = is_mark(p) ? WeightRef::zero() : WeightRef{&seq, p};
          visit(prime, source_ref(p));
        }
      },
      half);
  const CertifiedBound total = certified_sup(
      [&](auto&& visit) {
        for (std::uint64_t p = 1; p <= horizon; ++p) visit(WeightRef{&seq, p}, source_ref(p));
      },
      eps);
  if (!(cert.t_prime_distance == t1)) r.fail("||T - T'|| does not match");
  if (!(cert.t_double_prime_distance == t2)) r.fail("||T' - T''|| does not match");
  if (!(cert.prefix_distance == total)) r.fail("prefix distance does not match");
  if (!(t1.value < half) || !(t2.value < half) || !(total.value < eps)) r.fail("distance bounds exceed eps");

  // Each pair unit A_{2k+3} + A'_{2k+3} is a palindrome around its joining zero.
  for (unsigned k = 0; k < rounds; ++k) {
    const std::uint64_t first = plan.m(2 * static_cast<int>(k) + 2) + 1;
    const std::uint64_t last = plan.m(2 * static_cast<int>(k) + 3);
    std::vector<WeightRef> unit;
    for (std::uint64_t p = first; p < last; ++p) unit.push_back({&seq, p});
    unit.push_back(WeightRef::zero());
    for (std::uint64_t p = last; p-- > first;) unit.push_back({&seq, p});
    if (!is_palindromic(FiniteShiftBlock<WeightRef>{std::move(unit)}))
      r.fail("pair unit " + std::to_string(k) + " is not palindromic");
  }

  bool exact = t1.exact && t2.exact && total.exact;
  for (const auto& z : cert.zeroed_weights) exact = exact && z.bound.exact;
  for (const auto& p : cert.pair_bounds) exact = exact && p.bound.exact;
  if (cert.exactly_verified != exact) r.fail("verification mode flag does not match");
  return r;
}

}  // namespace cso
