#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqsim/noise.hpp"

namespace pqsim {

/// H_n applied k_max times to |0...0>; records prob_zero after every even k.
/// Point i holds k = 2(i+1).
class HtDecayExperiment final : public Experiment {
 public:
  HtDecayExperiment(int n, int k_max);

  std::vector<std::string> observables() const override { return {"prob_zero"}; }
  std::size_t points() const override { return static_cast<std::size_t>(k_max_ / 2); }
  Granularity default_granularity() const override { return Granularity::PerGate; }
  std::vector<std::vector<double>> run_trial(NoisyExecutor& exec) const override;

  int k_at(std::size_t point) const { return 2 * static_cast<int>(point + 1); }

 private:
  int n_;
  int k_max_;
};

/// Runs the (optionally approximate) QFT circuit on a fixed input and records
/// |<exact QFT output|noisy output>|.
/// Depolarizing noise goes on both qubits of every controlled R_d.
class QftFidelityExperiment final : public Experiment {
 public:
  QftFidelityExperiment(StateVector input, std::optional<int> approx_bound = std::nullopt);

  std::vector<std::string> observables() const override { return {"fidelity"}; }
  std::size_t points() const override { return 1; }
  Granularity default_granularity() const override { return Granularity::PerGate; }
  std::vector<std::vector<double>> run_trial(NoisyExecutor& exec) const override;

  const StateVector& reference() const { return reference_; }

 private:
  StateVector input_;
  StateVector reference_;
  Circuit gates_;
};

/// Order-finding register for Shor's QFT step: uniform superposition over
/// a = offset + m*order, a < 2^bits.
StateVector comb_state(int bits, std::uint64_t order, std::uint64_t offset);

/// Same state written into an existing register.
void fill_comb(StateVector& s, std::uint64_t order, std::uint64_t offset);

/// Deterministic pseudo-random normalized state.
StateVector random_state(int n, std::uint64_t seed);

/// Grover search for element k; records the target amplitude |<k|psi>| and
/// probability after each iteration j = 0..iterations (point j).
class GroverCurveExperiment final : public Experiment {
 public:
  GroverCurveExperiment(int n, std::uint64_t k, int iterations, bool ancilla = true);

  std::vector<std::string> observables() const override { return {"target_amplitude", "target_probability"}; }
  std::size_t points() const override { return static_cast<std::size_t>(iterations_ + 1); }
  Granularity default_granularity() const override { return Granularity::PerIteration; }
  std::vector<std::vector<double>> run_trial(NoisyExecutor& exec) const override;

 private:
  int n_;
  std::uint64_t k_;
  int iterations_;
  bool ancilla_;
  Circuit prepare_;
  Circuit step_;
};

}  // namespace pqsim
