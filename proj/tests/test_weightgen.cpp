#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cso/weightgen.hpp"
#include "oracles.hpp"

using namespace cso;
using oracle::inv_pow;

namespace {

Rational q(const char* s) { return parse_rational(s); }

}  // namespace

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(q("3/6"), Rational(1, 2));
  EXPECT_EQ(q(" -4 "), Rational(-4));
  EXPECT_EQ(to_string(q("6/4")), "3/2");
  EXPECT_EQ(to_string(q("7")), "7");
  EXPECT_THROW(q("1/0"), DomainError);
  EXPECT_THROW(q("1/"), DomainError);
  EXPECT_THROW(q("x"), DomainError);
  EXPECT_THROW(q("1.5"), DomainError);
  EXPECT_THROW(q(""), DomainError);
}

TEST(Kakutani, ListedValues) {
  EXPECT_EQ(kakutani_recursive(1), 1);
  EXPECT_EQ(kakutani_recursive(2), Rational(1, 2));
  EXPECT_EQ(kakutani_recursive(8), Rational(1, 8));
  EXPECT_EQ(kakutani_recursive(1u << 20), inv_pow(2, 20));
  EXPECT_EQ(kakutani_closed(3), 1);
  EXPECT_EQ(kakutani_closed(12), Rational(1, 4));
  EXPECT_EQ(kakutani_closed(1024), Rational(1, 1024));
  EXPECT_THROW(kakutani_recursive(0), DomainError);
  EXPECT_THROW(kakutani_closed(0), DomainError);
}

TEST(Kakutani, MatchesMaterializedBlocks) {
  const auto w = oracle::kakutani_block(13);
  ASSERT_EQ(w.size(), 8191u);
  for (std::uint64_t n = 1; n <= w.size(); ++n) {
    ASSERT_EQ(kakutani_recursive(n), w[n - 1]) << n;
    ASSERT_EQ(kakutani_closed(n), w[n - 1]) << n;
  }
}

TEST(Kakutani, RecursionEqualsClosedFormUpTo2To16) {
  for (std::uint64_t n = 1; n <= (1u << 16); ++n) {
    ASSERT_EQ(kakutani_recursive(n), kakutani_closed(n)) << n;
    ASSERT_EQ(kakutani_closed(n), oracle::kakutani_by_division(n)) << n;
  }
}

TEST(Kakutani, LargeIndices) {
  const std::uint64_t n = (std::uint64_t{3} << 40) + (std::uint64_t{1} << 37);
  EXPECT_EQ(kakutani_recursive(n), inv_pow(2, 37));
  EXPECT_EQ(kakutani_closed(std::uint64_t{1} << 63), inv_pow(2, 63));
}

TEST(Kakutani, PrefixPalindromes) {
  for (unsigned m = 1; m <= 12; ++m) {
    const std::uint64_t top = std::uint64_t{1} << m;
    for (std::uint64_t k = 1; k < top; ++k) ASSERT_EQ(kakutani_recursive(k), kakutani_recursive(top - k));
  }
}

TEST(Example, ListedValues) {
  EXPECT_EQ(example_weights(1), 1);
  EXPECT_EQ(example_weights(2), Rational(1, 2));
  EXPECT_EQ(example_weights(3), 1 + inv_pow(3, 3));
  EXPECT_EQ(example_weights(9), 1 + inv_pow(3, 7) + inv_pow(3, 9));
  EXPECT_EQ(example_weights(11), 1 + inv_pow(3, 3) + inv_pow(3, 5) + inv_pow(3, 11));
  EXPECT_EQ(example_weights(16), Rational(1, 16));
  EXPECT_EQ(example_weights(17), 1 + inv_pow(3, 15) + inv_pow(3, 17));
  EXPECT_THROW(example_weights(0), DomainError);
}

TEST(Example, MatchesRecursionTable) {
  const auto table = oracle::example_table(4096);
  for (std::uint64_t n = 1; n <= 4096; ++n) ASSERT_EQ(example_weights(n), table[n]) << n;
}

TEST(Example, PerturbationIsOnePowerOfThree) {
  for (unsigned m = 1; m <= 10; ++m) {
    const std::uint64_t p = std::uint64_t{1} << m;
    for (std::uint64_t j = 1; j < p; ++j)
      ASSERT_EQ(abs(Rational(example_weights(p + j) - example_weights(p - j))), inv_pow(3, p + j));
  }
}

TEST(Example, EnclosuresContainExactValue) {
  const auto table = oracle::example_table(300);
  for (unsigned bits : kPrecisionLadder)
    for (std::uint64_t n = 1; n <= 300; ++n) {
      const Enclosure e = example_weights_enclosure(n, bits);
      ASSERT_LE(e.lo, table[n]);
      ASSERT_GE(e.hi, table[n]);
      ASSERT_LT(e.hi - e.lo, inv_pow(2, bits));
    }
}

TEST(Example, EnclosureAtLargeIndex) {
  // n = 2^21 + j reflects to 2^21 - j = 2^20 + (2^20 - j), which reflects to j.
  const std::uint64_t j = 12345, n = (std::uint64_t{1} << 21) + j;
  const auto table = oracle::example_table(j);
  const Rational want = table[j] + inv_pow(3, (std::uint64_t{1} << 21) - j) + inv_pow(3, n);
  for (unsigned bits : {64u, 256u}) {
    const Enclosure e = example_weights_enclosure(n, bits);
    EXPECT_LT(e.hi - e.lo, inv_pow(2, bits));
    EXPECT_LE(e.lo, want);
    EXPECT_GE(e.hi, want);
  }
}

TEST(Sequence, Determinism) {
  const auto seq = example_sequence();
  for (std::uint64_t n : {5u, 77u, 1000u, 4095u}) {
    const Rational a = seq(n), b = seq(n);
    EXPECT_EQ(a.get_num(), b.get_num());
    EXPECT_EQ(a.get_den(), b.get_den());
  }
}

TEST(Sequence, CompareAgreesWithExact) {
  const auto seq = example_sequence();
  const auto table = oracle::example_table(512);
  for (std::uint64_t i = 1; i <= 512; i += 7) {
    EXPECT_EQ(compare(seq, i, Rational(1)), cmp(table[i], 1) > 0 ? 1 : (table[i] == 1 ? 0 : -1));
    for (std::uint64_t j = 1; j <= 512; j += 31) {
      const int want = table[i] < table[j] ? -1 : (table[i] == table[j] ? 0 : 1);
      ASSERT_EQ(compare(seq, i, j), want);
    }
  }
  // Exact ties reached only through refinement.
  EXPECT_EQ(compare(seq, 3, table[3]), 0);
  EXPECT_EQ(compare(seq, 2, 2), 0);
}

TEST(Sequence, FiniteSequencesAndFiles) {
  std::istringstream in("# weights\n1\n\n1/2\n  3/4\n");
  const auto values = read_weights(in);
  ASSERT_EQ(values.size(), 3u);
  EXPECT_EQ(values[2], Rational(3, 4));
  const auto seq = sequence_from_values("w", values);
  EXPECT_TRUE(seq.has_index(3));
  EXPECT_FALSE(seq.has_index(4));
  EXPECT_THROW(seq(4), DomainError);
  EXPECT_THROW(seq(0), DomainError);

  std::ostringstream out;
  write_weights(out, values);
  std::istringstream back(out.str());
  EXPECT_EQ(read_weights(back), values);

  std::istringstream bad("1\n-1/2\n");
  EXPECT_THROW(read_weights(bad), DomainError);
  std::istringstream junk("1\nabc\n");
  EXPECT_THROW(read_weights(junk), DomainError);
  EXPECT_THROW(sequence_by_name("nope"), DomainError);
  EXPECT_THROW(sequence_by_name("file:/nonexistent/w.txt"), DomainError);
}

TEST(Distinct, Examples) {
  EXPECT_TRUE(check_distinct(example_sequence(), 16).distinct);
  const auto k = check_distinct(kakutani_sequence(), 4);
  EXPECT_FALSE(k.distinct);
  ASSERT_TRUE(k.witness.has_value());
  EXPECT_EQ(*k.witness, std::make_pair(std::uint64_t{1}, std::uint64_t{3}));
  EXPECT_TRUE(check_distinct(example_sequence(), 4096).distinct);
}

TEST(Distinct, SmallestWitness) {
  const auto seq = sequence_from_values("w", {Rational(5), Rational(2), Rational(2), Rational(5)});
  const auto r = check_distinct(seq, 4);
  EXPECT_EQ(*r.witness, std::make_pair(std::uint64_t{1}, std::uint64_t{4}));
}

TEST(Corollary, KakutaniIsExactlySymmetric) {
  const auto rows = corollary_check(kakutani_sequence(), 5);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.alpha_pow2, inv_pow(2, r.n));
    EXPECT_EQ(r.symmetry_defect, 0);
  }
}

TEST(Corollary, ExampleDefectsDecay) {
  // Reference: brute force over the materialized table.
  const auto table = oracle::example_table(64);
  const auto rows = corollary_check(example_sequence(), 6);
  for (const auto& r : rows) {
    const std::uint64_t top = std::uint64_t{1} << r.n;
    Rational want = 0;
    for (std::uint64_t k = 1; k < top; ++k) want = std::max(want, Rational(abs(Rational(table[k] - table[top - k]))));
    EXPECT_EQ(r.symmetry_defect, want) << r.n;
    EXPECT_EQ(r.alpha_pow2, inv_pow(2, r.n));
    if (r.n >= 2) {
      EXPECT_EQ(r.symmetry_defect, inv_pow(3, top / 2 + 1));
    }
  }
}

TEST(Corollary, ConstantSequenceViolatesDecay) {
  const auto ones = WeightSequence("ones", [](std::uint64_t) { return Rational(1); });
  for (const auto& r : corollary_check(ones, 3)) EXPECT_EQ(r.alpha_pow2, 1);
}

TEST(Corollary, IndexRangeExhausted) {
  const auto seq = sequence_from_values("w", std::vector<Rational>(10, Rational(1)));
  try {
    corollary_check(seq, 5);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.last_completed(), 3u);
  }
}

TEST(Multiplicity, KakutaniLaw) {
  for (unsigned k = 1; k <= 14; ++k) {
    const auto counts = value_multiplicities(kakutani_sequence(), std::uint64_t{1} << k);
    for (unsigned m = 0; m < k; ++m) ASSERT_EQ(counts.at(inv_pow(2, m)), std::uint64_t{1} << (k - m - 1));
  }
}

TEST(Accumulation, KakutaniClusters) {
  const auto rep = accumulation_analysis(kakutani_sequence(), 1024, 1e-6);
  ASSERT_EQ(rep.clusters.size(), 11u);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < rep.clusters.size(); ++i) {
    const auto& c = rep.clusters[i];
    total += c.multiplicity;
    EXPECT_DOUBLE_EQ(c.center, std::ldexp(1.0, static_cast<int>(i) - 10));
    if (i > 0) {
      EXPECT_GT(c.lo - rep.clusters[i - 1].hi, rep.tolerance);
    }
  }
  EXPECT_EQ(total, 1024u);
  EXPECT_EQ(rep.clusters[9].multiplicity, 256u);  // value 1/2
  EXPECT_TRUE(rep.clusters[10].accumulating);
}

TEST(Accumulation, IncreasingSequence) {
  const auto seq = WeightSequence("n/(n+1)", [](std::uint64_t n) { return Rational(n, n + 1); });
  const auto rep = accumulation_analysis(seq, 1000, 1e-3);
  const auto& top = rep.clusters.back();
  EXPECT_GT(top.multiplicity, 950u);
  EXPECT_TRUE(top.accumulating);
  EXPECT_NEAR(top.hi, 1.0, 1e-3);
  for (std::size_t i = 0; i + 1 < rep.clusters.size(); ++i) EXPECT_FALSE(rep.clusters[i].accumulating);
  EXPECT_THROW(accumulation_analysis(seq, 10, 0.0), DomainError);
}
