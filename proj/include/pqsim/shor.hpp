#pragma once

// Shor factoring: number theory, quantum order finding (gate-level or
// semantic), continued-fraction post-processing with the four optional
// checks, and the per-iteration success-probability bound.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqsim/noise.hpp"
#include "pqsim/random.hpp"
#include "pqsim/statevec.hpp"

namespace pqsim {

// ---------------------------------------------------------------------------
// Number theory. N < 2^20 at desk scale, so products fit in 64 bits.

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm(std::uint64_t a, std::uint64_t b);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
/// Least r > 0 with x^r = 1 (mod N). Requires gcd(x, N) = 1.
std::uint64_t multiplicative_order(std::uint64_t x, std::uint64_t modulus);
/// Euler's totient by trial division.
std::uint64_t euler_phi(std::uint64_t n);

// ---------------------------------------------------------------------------
// Order finding

enum class OrderFindMode { GateLevel, Semantic };

std::string to_string(OrderFindMode mode);
OrderFindMode parse_order_find_mode(const std::string& text);

struct OrderFindOptions {
  OrderFindMode mode = OrderFindMode::Semantic;
  const NoiseConfig* noise = nullptr;  // noisy QFT circuit instead of the FFT
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  int workers = default_workers();
};

/// Runs the quantum part for base x and returns the measured value y of the
/// 2l-qubit argument register (l = bit length of N). A semantic run reuses
/// `workspace` when it already has 2l qubits (otherwise it is replaced).
std::uint64_t order_find(std::uint64_t x, std::uint64_t modulus, const OrderFindOptions& options, Rng& rng,
                         StateVector* workspace = nullptr);

/// Exact |0>|a> -> |x^a>|a> probability of each argument-register outcome,
/// by direct DFT of the comb states (O(4^l), for tests on small N).
std::vector<double> order_find_distribution(std::uint64_t x, std::uint64_t modulus);

// ---------------------------------------------------------------------------
// Post-processing

enum class Check { Base, Neighbor, Gcd, SmallFactor, Lcm };

struct OrderCandidate {
  std::uint64_t k = 0;
  std::uint64_t r = 0;
  Check provenance = Check::Base;
};

/// Convergents k/r of y / 2^bits with 0 < k < r < N and
/// |y/2^bits - k/r| <= 2^-(bits+1), largest r first. y = 0 gives none.
std::vector<OrderCandidate> convergents(std::uint64_t y, int bits, std::uint64_t modulus);

enum class Failure { None, NotOrder, OddOrder, TrivialRoot };

struct CandidateOutcome {
  std::uint64_t factor = 0;  // 0 on failure
  Failure failure = Failure::None;
  bool ok() const { return factor != 0; }
};

/// Standard check: fails if x^r != 1, r odd, or x^{r/2} = +-1 (mod N);
/// otherwise returns a nontrivial gcd(N, x^{r/2} +- 1).
CandidateOutcome try_candidate(std::uint64_t modulus, std::uint64_t x, std::uint64_t r);

/// For even r, a nontrivial gcd(N, x^{r/2} +- 1) regardless of x^r; else 0.
std::uint64_t gcd_check(std::uint64_t modulus, std::uint64_t x, std::uint64_t r);

namespace improvements {
inline constexpr unsigned kNeighbor = 1;
inline constexpr unsigned kGcd = 2;
inline constexpr unsigned kSmallFactor = 4;
inline constexpr unsigned kLcm = 8;
inline constexpr unsigned kAll = 15;
}  // namespace improvements

/// Parses "none", "all", a bitmask number, or names joined by "+"
/// (neighbor+gcd+small-factor+lcm).
unsigned parse_improvements(const std::string& text);

struct CheckTally {
  std::uint64_t success = 0;
  std::uint64_t failure = 0;
};

/// Per-check tallies. A check counts once per iteration in which it ran:
/// success when it produced the factor, failure otherwise.
struct ShorTallies {
  CheckTally neighbor, gcd, small_factor, lcm;

  CheckTally& operator[](Check c);
  const CheckTally& operator[](Check c) const;
};

struct PostprocessOptions {
  unsigned improvements = 0;
  int small_factor_bound = 8;
  int neighbor_radius = 2;
};

/// Post-processing state for one factoring run. Candidates are remembered
/// across iterations for the LCM check.
class Postprocessor {
 public:
  Postprocessor(std::uint64_t modulus, int bits, PostprocessOptions options);

  /// Returns a nontrivial factor or 0.
  std::uint64_t process(std::uint64_t x, std::uint64_t y, ShorTallies& tallies);

  const std::vector<std::uint64_t>& remembered() const { return remembered_; }

 private:
  std::uint64_t try_r(std::uint64_t x, std::uint64_t r, bool (&ran)[5], Check& winner);
  void remember(std::uint64_t r);

  std::uint64_t modulus_;
  int bits_;
  PostprocessOptions options_;
  std::vector<std::uint64_t> remembered_;
};

/// Lower bound on the per-iteration success probability:
/// (1 - phi/(N-1)) + phi/(N-1) * (1/2)(4/pi^2) e^{-gamma} / log log N.
double prob_succ(std::uint64_t modulus, std::uint64_t phi);

// ---------------------------------------------------------------------------
// Full run

struct ShorConfig {
  std::uint64_t modulus = 15;
  OrderFindMode mode = OrderFindMode::Semantic;
  PostprocessOptions post;
  std::optional<NoiseConfig> noise;
  int max_iterations = 1000;
  std::optional<std::uint64_t> base;  // fixed x instead of a random draw
  std::uint64_t memory_budget = kDefaultMemoryBudget;
  int workers = default_workers();

  void validate() const;
};

struct ShorStats {
  int iterations = 0;
  std::uint64_t factor = 0;  // 0 when max_iterations ran out
  ShorTallies tallies;
  int gcd_shortcuts = 0;  // iterations ended by gcd(x, N) > 1

  bool succeeded() const { return factor != 0; }
};

ShorStats shor_factor(const ShorConfig& cfg, Rng& rng);

}  // namespace pqsim
