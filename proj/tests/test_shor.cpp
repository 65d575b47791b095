#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "pqsim/shor.hpp"
#include "support.hpp"

using namespace pqsim;

namespace {

// Every reduced h/k with 0 < h < k < N and 2|y k - h Q| <= k, found by
// scanning denominators rather than by continued fractions.
std::set<std::pair<std::uint64_t, std::uint64_t>> brute_force_fractions(std::uint64_t y, int bits,
                                                                        std::uint64_t modulus) {
  const std::int64_t q = std::int64_t{1} << bits;
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::int64_t k = 2; k < static_cast<std::int64_t>(modulus); ++k) {
    const std::int64_t base = static_cast<std::int64_t>(y) * k / q;
    for (std::int64_t h = std::max<std::int64_t>(1, base - 1); h <= base + 1 && h < k; ++h) {
      if (std::gcd(h, k) != 1) continue;
      if (2 * std::llabs(static_cast<std::int64_t>(y) * k - h * q) <= k)
        out.insert({static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(k)});
    }
  }
  return out;
}

double total_variation(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs,
                       std::uint64_t draws) {
  double tv = 0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    tv += std::abs(static_cast<double>(counts[i]) / static_cast<double>(draws) - probs[i]);
  return tv / 2;
}

std::vector<std::uint64_t> sample_order_find(std::uint64_t x, std::uint64_t n, OrderFindMode mode,
                                             std::uint64_t draws, std::uint64_t seed) {
  const int bits = 2 * bit_length(n);
  std::vector<std::uint64_t> counts(std::size_t{1} << bits, 0);
  OrderFindOptions opts;
  opts.mode = mode;
  opts.workers = 1;
  Rng rng(seed);
  for (std::uint64_t t = 0; t < draws; ++t) ++counts[order_find(x, n, opts, rng)];
  return counts;
}

double mean_iterations(const ShorConfig& base, unsigned mask, int runs, std::uint64_t seed) {
  ShorConfig cfg = base;
  cfg.post.improvements = mask;
  double total = 0;
  for (int run = 0; run < runs; ++run) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(run));
    const ShorStats st = shor_factor(cfg, rng);
    EXPECT_TRUE(st.succeeded());
    total += st.iterations;
  }
  return total / runs;
}

}  // namespace

TEST(NumberTheory, Gcd) {
  EXPECT_EQ(gcd(15, 12), 3u);
  EXPECT_EQ(gcd(21311, 211), 211u);
  EXPECT_EQ(gcd(7, 15), 1u);
  EXPECT_EQ(gcd(0, 9), 9u);
  EXPECT_EQ(lcm(4, 6), 12u);
}

TEST(NumberTheory, OrdersAndTotients) {
  EXPECT_EQ(multiplicative_order(11, 15), 2u);
  EXPECT_EQ(multiplicative_order(7, 15), 4u);
  EXPECT_EQ(multiplicative_order(2, 21), 6u);
  EXPECT_EQ(euler_phi(21311), 210u * 100u);
  EXPECT_EQ(euler_phi(22999), 210u * 108u);
  EXPECT_EQ(powmod(3, 0, 7), 1u);
  EXPECT_EQ(powmod(1000003, 1000001, 1048573), powmod(1000003 % 1048573, 1000001, 1048573));
}

TEST(Convergents, HandExamples) {
  using Fraction = std::pair<std::uint64_t, std::uint64_t>;
  auto only = [](const std::vector<OrderCandidate>& c) { return c.size() == 1 ? Fraction{c[0].k, c[0].r} : Fraction{}; };
  EXPECT_EQ(only(convergents(128, 8, 15)), Fraction(1, 2));
  EXPECT_EQ(only(convergents(64, 8, 15)), Fraction(1, 4));
  EXPECT_EQ(only(convergents(85, 8, 15)), Fraction(1, 3));
  EXPECT_TRUE(convergents(0, 8, 15).empty());
}

TEST(Convergents, LargestDenominatorFirst) {
  for (std::uint64_t y = 1; y < 4096; ++y) {
    const auto c = convergents(y, 12, 55);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i - 1].r, c[i].r) << y;
  }
}

TEST(Convergents, ExhaustiveAgainstBruteForce) {
  for (const std::uint64_t n : {15u, 21u, 33u, 55u, 221u}) {
    const int bits = 2 * bit_length(n);
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << bits); ++y) {
      std::set<std::pair<std::uint64_t, std::uint64_t>> got;
      for (const OrderCandidate& c : convergents(y, bits, n)) {
        EXPECT_EQ(std::gcd(c.k, c.r), 1u);
        EXPECT_LT(c.k, c.r);
        EXPECT_LT(c.r, n);
        got.insert({c.k, c.r});
      }
      ASSERT_EQ(got, brute_force_fractions(y, bits, n)) << "N=" << n << " y=" << y;
    }
  }
}

TEST(TryCandidate, Examples) {
  const CandidateOutcome ok = try_candidate(15, 11, 2);
  ASSERT_TRUE(ok.ok());
  EXPECT_TRUE(ok.factor == 3 || ok.factor == 5);
  EXPECT_EQ(try_candidate(15, 14, 2).failure, Failure::TrivialRoot);
  EXPECT_EQ(try_candidate(15, 7, 3).failure, Failure::NotOrder);
  EXPECT_EQ(try_candidate(21, 4, 3).failure, Failure::OddOrder);
}

TEST(Improvements, ParseForms) {
  EXPECT_EQ(parse_improvements("none"), 0u);
  EXPECT_EQ(parse_improvements("all"), 15u);
  EXPECT_EQ(parse_improvements("5"), 5u);
  EXPECT_EQ(parse_improvements("gcd+lcm"), improvements::kGcd | improvements::kLcm);
  EXPECT_THROW(parse_improvements("16"), ContractViolation);
  EXPECT_THROW(parse_improvements("gcd+bogus"), ContractViolation);
}

TEST(Improvements, GcdCheckWitness) {
  // N=15, x=7 has order 4; y=128 yields r=2 with 7^2 = 4, yet gcd(15, 7-1) = 3.
  ShorTallies t;
  Postprocessor plain(15, 8, {});
  EXPECT_EQ(plain.process(7, 128, t), 0u);
  Postprocessor with_gcd(15, 8, {improvements::kGcd});
  EXPECT_EQ(with_gcd.process(7, 128, t), 3u);
  EXPECT_EQ(t.gcd.success, 1u);
  EXPECT_EQ(t.gcd.failure, 0u);
}

TEST(Improvements, NeighborWitness) {
  // 65/256 has no convergent within 1/512; 64/256 = 1/4 is the order of 7.
  EXPECT_TRUE(convergents(65, 8, 15).empty() || convergents(65, 8, 15)[0].r != 4);
  ShorTallies t;
  Postprocessor plain(15, 8, {});
  EXPECT_EQ(plain.process(7, 65, t), 0u);
  Postprocessor neighbor(15, 8, {improvements::kNeighbor});
  const std::uint64_t f = neighbor.process(7, 65, t);
  EXPECT_TRUE(f == 3 || f == 5);
  EXPECT_EQ(t.neighbor.success, 1u);
}

TEST(Improvements, SmallFactorWitness) {
  // y = 341 gives r = 3 for x = 2 mod 21; the true order is 2*3.
  ShorTallies t;
  Postprocessor plain(21, 10, {});
  EXPECT_EQ(plain.process(2, 341, t), 0u);
  Postprocessor sf(21, 10, {improvements::kSmallFactor});
  const std::uint64_t f = sf.process(2, 341, t);
  EXPECT_TRUE(f == 3 || f == 7);
  EXPECT_EQ(t.small_factor.success, 1u);
}

TEST(Improvements, LcmWitness) {
  // N=21, x=2 (order 6): iteration one sees r=2, iteration two r=3.
  ShorTallies t;
  Postprocessor lcm_only(21, 10, {improvements::kLcm});
  EXPECT_EQ(lcm_only.process(2, 512, t), 0u);
  EXPECT_EQ(t.lcm.success + t.lcm.failure, 0u);
  const std::uint64_t f = lcm_only.process(2, 341, t);
  EXPECT_TRUE(f == 3 || f == 7);
  EXPECT_EQ(t.lcm.success, 1u);
  EXPECT_EQ(lcm_only.remembered(), (std::vector<std::uint64_t>{2, 3}));

  Postprocessor plain(21, 10, {});
  EXPECT_EQ(plain.process(2, 512, t), 0u);
  EXPECT_EQ(plain.process(2, 341, t), 0u);
}

TEST(Improvements, FailedChecksAreTallied) {
  ShorTallies t;
  Postprocessor all(15, 8, {improvements::kAll});
  // x = 14 has order 2 and x^1 = -1: nothing can succeed.
  EXPECT_EQ(all.process(14, 128, t), 0u);
  EXPECT_EQ(t.neighbor.failure, 1u);
  EXPECT_EQ(t.neighbor.success, 0u);
}

TEST(OrderFind, OrderTwoDistribution) {
  const std::vector<double> d = order_find_distribution(11, 15);
  ASSERT_EQ(d.size(), 256u);
  EXPECT_NEAR(d[0], 0.5, 1e-12);
  EXPECT_NEAR(d[128], 0.5, 1e-12);
  const auto counts = sample_order_find(11, 15, OrderFindMode::Semantic, 2000, 4);
  EXPECT_EQ(counts[0] + counts[128], 2000u);
}

TEST(OrderFind, OrderFourDistribution) {
  const std::vector<double> d = order_find_distribution(7, 15);
  for (std::uint64_t y : {0u, 64u, 128u, 192u}) EXPECT_NEAR(d[y], 0.25, 1e-12);
}

TEST(OrderFind, SemanticMatchesExactDistribution) {
  const std::uint64_t draws = 100000;
  for (const auto& [n, x] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{15, 7}, {21, 2}, {35, 2}}) {
    const auto counts = sample_order_find(x, n, OrderFindMode::Semantic, draws, n);
    EXPECT_LE(total_variation(counts, order_find_distribution(x, n), draws), 0.02) << n;
  }
}

TEST(OrderFind, GateLevelMatchesSemantic) {
  const std::uint64_t draws = 10000;
  for (std::uint64_t x : {2u, 7u, 11u}) {
    const auto counts = sample_order_find(x, 15, OrderFindMode::GateLevel, draws, 100 + x);
    EXPECT_TRUE(test::chi_square_ok(counts, order_find_distribution(x, 15), draws)) << x;
  }
}

TEST(OrderFind, GateLevelRefusesLargeModulus) {
  OrderFindOptions opts;
  opts.mode = OrderFindMode::GateLevel;
  Rng rng(1);
  EXPECT_ANY_THROW(order_find(2, 35, opts, rng));
}

TEST(ProbSucc, ReferenceValues) {
  const std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> factors = {
      {21311, {211, 101}}, {21733, {211, 103}}, {22999, {211, 109}}, {22523, {223, 101}},
      {22927, {227, 101}}, {22969, {223, 103}}, {23129, {229, 101}}};
  const std::map<std::uint64_t, double> theory = {{21311, 15.79}, {21733, 15.85}, {22999, 16.00},
                                                  {22523, 15.88}, {22927, 15.91}, {22969, 15.94},
                                                  {23129, 15.92}};
  for (const auto& [n, pq] : factors) {
    ASSERT_EQ(pq.first * pq.second, n);
    const std::uint64_t phi = (pq.first - 1) * (pq.second - 1);
    EXPECT_EQ(phi, euler_phi(n));
    EXPECT_NEAR(1.0 / prob_succ(n, phi), theory.at(n), 0.02) << n;
  }
}

TEST(ProbSucc, PrimeLimitAndDomain) {
  const double g = 0.57721566490153286;
  const std::uint64_t n = 1009;
  EXPECT_NEAR(prob_succ(n, n - 1), 0.5 * (4 / (M_PI * M_PI)) * std::exp(-g) / std::log(std::log(1009.0)), 1e-15);
  EXPECT_THROW(prob_succ(15, 8), ContractViolation);
}

TEST(ShorFactor, GateLevelFifteen) {
  ShorConfig cfg;
  cfg.modulus = 15;
  cfg.mode = OrderFindMode::GateLevel;
  cfg.base = 11;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const ShorStats st = shor_factor(cfg, rng);
    ASSERT_TRUE(st.succeeded());
    EXPECT_TRUE(st.factor == 3 || st.factor == 5);
  }
}

TEST(ShorFactor, ReportedFactorsDivide) {
  for (const std::uint64_t n : {15u, 21u, 33u, 35u, 221u, 391u, 899u}) {
    for (unsigned mask : {0u, 15u}) {
      ShorConfig cfg;
      cfg.modulus = n;
      cfg.post.improvements = mask;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = Rng::derive(n, seed);
        const ShorStats st = shor_factor(cfg, rng);
        ASSERT_TRUE(st.succeeded()) << n;
        EXPECT_GT(st.factor, 1u);
        EXPECT_LT(st.factor, n);
        EXPECT_EQ(n % st.factor, 0u);
      }
    }
  }
}

TEST(ShorFactor, ImprovementsNeverHurt) {
  ShorConfig cfg;
  cfg.modulus = 899;  // 29 * 31
  cfg.workers = 1;
  const double original = mean_iterations(cfg, 0, 100, 5);
  const double improved = mean_iterations(cfg, improvements::kAll, 100, 5);
  EXPECT_LE(improved, original);
  // Original algorithm stays below the theoretical bound.
  EXPECT_LE(original, 1.0 / prob_succ(899, euler_phi(899)));
}

TEST(ShorFactor, ConfigValidation) {
  ShorConfig cfg;
  cfg.modulus = 16;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg.modulus = 1u << 20;
  cfg.modulus += 1;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg.modulus = 15;
  cfg.base = 14;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(ShorFactor, IterationCapReportsFailure) {
  ShorConfig cfg;
  // 5 has order 6 mod 21 and 5^3 = -1, so every candidate fails.
  cfg.modulus = 21;
  cfg.base = 5;
  cfg.max_iterations = 3;
  Rng rng(3);
  const ShorStats st = shor_factor(cfg, rng);
  EXPECT_FALSE(st.succeeded());
  EXPECT_EQ(st.iterations, 3);
}
