#pragma once

// Batch experiment driver: each ExperimentSpec kind emits one experiment
// family as CSV. Experiment kinds are deterministic given the seed and
// carry no timing columns; the *-bench kinds report wall time and speedup.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pqsim/noise.hpp"
#include "pqsim/shor.hpp"

namespace pqsim {

enum class ExperimentKind { HtDecay, QftFidelity, GroverCurve, Shor, QftBench, HtBench, GateMicrobench };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);
Granularity parse_granularity(const std::string& text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::HtDecay;

  // Sweep lists; every combination yields its own block of rows.
  std::vector<int> n{10};
  std::vector<double> p{0.0};
  std::vector<double> sigma{0.0};
  std::vector<int> workers{1};
  std::vector<std::optional<int>> approx_bound{std::nullopt};  // qft-fidelity
  std::vector<std::uint64_t> modulus;                           // shor
  std::vector<unsigned> improvements{0};                        // shor

  int k = 100;                            // ht-decay: largest iteration count
  std::optional<int> iterations;          // grover-curve (default floor(pi/4 sqrt(2^n)))
  std::optional<std::uint64_t> target;    // grover-curve marked element
  bool ancilla = true;                    // grover-curve oracle form
  std::string input = "random";           // qft-fidelity: random | comb | basis
  std::uint64_t trials = 100;             // trajectories, or Shor runs
  std::uint64_t seed = 1;
  Granularity granularity = Granularity::ExperimentDefault;

  OrderFindMode mode = OrderFindMode::Semantic;
  int max_iterations = 1000;
  std::optional<std::uint64_t> factor_p, factor_q;  // known factorization for phi(N)

  int repeats = 5;  // bench kinds: median of this many timings
  std::uint64_t memory_budget = kDefaultMemoryBudget;

  void validate() const;
};

/// Runs `spec` and returns the CSV text (header row, comma separated, "."
/// decimals). Throws BudgetError before any work if a register would exceed
/// the memory budget.
std::string run_experiment(const ExperimentSpec& spec);

/// Column names of a kind's CSV, in order.
std::vector<std::string> csv_columns(ExperimentKind kind);

/// Median wall-clock seconds of `repeats` calls to fn.
double median_seconds(const std::function<void()>& fn, int repeats);

struct SpeedupRow {
  int workers = 1;
  double seconds = 0.0;
  double speedup = 1.0;  // seconds at workers=1 divided by this row's seconds
};

/// Median-of-`repeats` timings of an ht-bench, qft-bench (circuit path) or
/// gate-microbench workload per worker count, normalized to workers=1.
std::vector<SpeedupRow> bench_speedup(ExperimentKind kind, int n, const std::vector<int>& workers, int repeats = 5);

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double v);

}  // namespace pqsim
