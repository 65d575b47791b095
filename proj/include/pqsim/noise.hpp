#pragma once

// Error models: depolarizing channel (identity w.p. 1-p, else one of
// sigma_x, sigma_y, sigma_z w.p. p/3 each) and operational error (Gaussian
// deviations on the rotation/phase angles of a gate's decomposition), plus a
// seeded Monte-Carlo trajectory runner.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pqsim/circuits.hpp"
#include "pqsim/kernels.hpp"
#include "pqsim/random.hpp"
#include "pqsim/statevec.hpp"

namespace pqsim {

/// Where depolarizing noise is injected. ExperimentDefault lets each
/// experiment pick its own unit (HT: after every H on its qubit; QFT: on both
/// qubits of every controlled R_d; Grover: all qubits once per iteration).
enum class Granularity { ExperimentDefault, PerGate, PerIteration };

struct NoiseConfig {
  double p = 0.0;      // depolarizing probability per qubit per injection point
  double sigma = 0.0;  // std-dev of angle deviations (radians)
  Granularity granularity = Granularity::ExperimentDefault;
  std::uint64_t seed = 0;

  bool noiseless() const { return p == 0.0 && sigma == 0.0; }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Gate decomposition

enum class Primitive { Rotation, Phase1, Phase2 };

/// U_R(theta) = [[cos, -sin], [sin, cos]], U_P1(phi) = diag(1, e^{i phi}),
/// U_P2(phi) = diag(e^{i phi}, 1).
struct Factor {
  Primitive kind;
  double angle;
};

/// Ordered factor list; the gate is the left-to-right product.
struct RotationDecomposition {
  std::vector<Factor> factors;

  Eigen::Matrix2cd product() const;
};

Eigen::Matrix2cd primitive_matrix(Primitive kind, double angle);

enum class NamedGate { Identity, Hadamard, Not, Phase };

/// H = U_R(pi/4) U_P1(pi); NOT = U_R(pi/2) U_P1(pi); R_d = U_P1(sign*pi/2^d).
RotationDecomposition decompose(NamedGate gate, int depth = 0, int sign = 1);

/// Decomposition of a circuit gate's 2x2 matrix; false for gates with no
/// physical rotation (swap, phase flip, global phase).
bool decompose(const GateOp& g, RotationDecomposition& out);

/// Adds an independent N(0, sigma^2) deviation to every angle and returns the
/// product. Exactly unitary by construction.
GateMatrix perturb(const RotationDecomposition& d, double sigma, Rng& rng);

/// Independently per qubit: with probability p apply sigma_x, sigma_y or
/// sigma_z (uniform). Returns the number of Pauli events.
std::uint64_t inject_depolarizing(StateVector& s, std::span<const int> qubits, double p, Rng& rng,
                                  int workers = default_workers());

// ---------------------------------------------------------------------------
// Analytic |0><0| decay of the repeated Hadamard transform (k even)

/// ((1 + (1 - 4p/3)^k) / 2)^n
double analytic_ht_depolarizing(int n, double p, int k);

/// ((1 + e^{-9 k sigma^2 / 4}) / 2)^n
double analytic_ht_operational(int n, double sigma, int k);

// ---------------------------------------------------------------------------
// Trajectories

/// Welford accumulator; merge() is order independent up to rounding.
struct RunningStat {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStat& other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double standard_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

struct Series {
  std::string name;
  std::vector<RunningStat> points;
};

struct TrajectoryStats {
  std::uint64_t trials = 0;
  std::vector<Series> series;

  const Series& at(const std::string& name) const;
  double mean(const std::string& name, std::size_t point = 0) const { return at(name).points.at(point).mean; }
  double standard_error(const std::string& name, std::size_t point = 0) const {
    return at(name).points.at(point).standard_error();
  }
  void merge(const TrajectoryStats& other);
};

/// Applies circuit gates under a NoiseConfig for one trajectory. All draws come
/// from the trial's Rng in circuit order: angle deviations for a gate first,
/// then depolarizing draws.
class NoisyExecutor {
 public:
  NoisyExecutor(const NoiseConfig& cfg, Granularity effective, Rng& rng, int workers)
      : cfg_(cfg), granularity_(effective), rng_(rng), workers_(workers) {}

  /// Applies g (perturbed when sigma > 0). Under per-gate granularity the
  /// touched qubits are depolarized afterwards if `injection_point`.
  void apply(StateVector& s, const GateOp& g, bool injection_point = true);
  void run(StateVector& s, std::span<const GateOp> circuit, bool injection_points = true);

  /// Iteration boundary: under per-iteration granularity depolarize all qubits.
  void end_iteration(StateVector& s);

  Granularity granularity() const { return granularity_; }
  std::uint64_t pauli_events() const { return pauli_events_; }
  Rng& rng() { return rng_; }
  int workers() const { return workers_; }

 private:
  NoiseConfig cfg_;
  Granularity granularity_;
  Rng& rng_;
  int workers_;
  std::uint64_t pauli_events_ = 0;
};

/// A scripted circuit with injection points and per-point observables.
class Experiment {
 public:
  virtual ~Experiment() = default;
  virtual std::vector<std::string> observables() const = 0;
  virtual std::size_t points() const = 0;
  virtual Granularity default_granularity() const = 0;
  /// One trajectory; returns values[observable][point].
  virtual std::vector<std::vector<double>> run_trial(NoisyExecutor& exec) const = 0;
};

/// Runs `trials` trajectories, trial t on stream Rng::derive(cfg.seed, t).
TrajectoryStats run_trajectories(const Experiment& experiment, const NoiseConfig& cfg, std::uint64_t trials,
                                 int workers = default_workers());

/// One trajectory of `experiment` on its derived stream (for determinism checks).
std::vector<std::vector<double>> run_single_trial(const Experiment& experiment, const NoiseConfig& cfg,
                                                  std::uint64_t trial, int workers = default_workers());

}  // namespace pqsim
