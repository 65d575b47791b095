#include "pqsim/experiments.hpp"

#include <cmath>

namespace pqsim {

HtDecayExperiment::HtDecayExperiment(int n, int k_max) : n_(n), k_max_(k_max) {
  detail::require(k_max >= 2 && k_max % 2 == 0, "HT decay needs an even k_max >= 2");
  detail::require(n >= 1 && n <= kMaxQubits, "HT decay: qubit count out of range");
}

std::vector<std::vector<double>> HtDecayExperiment::run_trial(NoisyExecutor& exec) const {
  StateVector s(n_);
  const Circuit sweep = hadamard_gates({0, n_});
  std::vector<double> trace;
  trace.reserve(points());
  for (int k = 1; k <= k_max_; ++k) {
    exec.run(s, sweep);
    exec.end_iteration(s);
    if (k % 2 == 0) trace.push_back(prob_zero(s));
  }
  return {trace};
}

QftFidelityExperiment::QftFidelityExperiment(StateVector input, std::optional<int> approx_bound)
    : input_(std::move(input)), reference_(input_), gates_(qft_gates({0, input_.qubits()}, approx_bound)) {
  qft_circuit(reference_, std::nullopt, 1);
}

std::vector<std::vector<double>> QftFidelityExperiment::run_trial(NoisyExecutor& exec) const {
  StateVector s = input_;
  for (const GateOp& g : gates_) exec.apply(s, g, g.kind == GateKind::ControlledPhase);
  exec.end_iteration(s);
  return {{fidelity(reference_, s)}};
}

StateVector comb_state(int bits, std::uint64_t order, std::uint64_t offset) {
  StateVector s(bits);
  fill_comb(s, order, offset);
  return s;
}

void fill_comb(StateVector& s, std::uint64_t order, std::uint64_t offset) {
  detail::require(order >= 1 && offset < order, "comb: offset must be below the order");
  s.amplitudes().setZero();
  const std::uint64_t size = s.size();
  const std::uint64_t count = (size - offset - 1) / order + 1;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::uint64_t a = offset; a < size; a += order) s[a] = amp;
}

StateVector random_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  StateVector s(n);
  for (std::uint64_t i = 0; i < s.size(); ++i) s[i] = {rng.normal(1.0), rng.normal(1.0)};
  s.normalize();
  return s;
}

GroverCurveExperiment::GroverCurveExperiment(int n, std::uint64_t k, int iterations, bool ancilla)
    : n_(n),
      k_(k),
      iterations_(iterations),
      ancilla_(ancilla),
      prepare_(grover_prepare_gates(n, ancilla)),
      step_(grover_iteration_gates(n, k, ancilla)) {
  detail::require(n >= 1 && grover_qubits(n, ancilla) <= kMaxQubits, "grover: qubit count out of range");
  detail::require(k < (std::uint64_t{1} << n), "grover: marked element out of range");
  detail::require(iterations >= 0, "grover: negative iteration count");
}

std::vector<std::vector<double>> GroverCurveExperiment::run_trial(NoisyExecutor& exec) const {
  StateVector s(grover_qubits(n_, ancilla_));
  exec.run(s, prepare_, false);
  std::vector<double> amp, prob;
  auto record = [&] {
    const double pk = grover_target_probability(s, k_, ancilla_);
    prob.push_back(pk);
    amp.push_back(std::sqrt(pk));
  };
  record();
  for (int j = 0; j < iterations_; ++j) {
    exec.run(s, step_);
    exec.end_iteration(s);
    record();
  }
  return {amp, prob};
}

}  // namespace pqsim
