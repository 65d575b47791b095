#include "pqsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pqsim {

void NoiseConfig::validate() const {
  detail::require(p >= 0.0 && p <= 1.0, "depolarizing probability must lie in [0, 1]");
  detail::require(sigma >= 0.0, "sigma must be non-negative");
}

Eigen::Matrix2cd primitive_matrix(Primitive kind, double angle) {
  Eigen::Matrix2cd m;
  switch (kind) {
    case Primitive::Rotation: {
      const double c = std::cos(angle), s = std::sin(angle);
      m << c, -s, s, c;
      break;
    }
    case Primitive::Phase1: m << 1.0, 0.0, 0.0, std::polar(1.0, angle); break;
    case Primitive::Phase2: m << std::polar(1.0, angle), 0.0, 0.0, 1.0; break;
  }
  return m;
}

Eigen::Matrix2cd RotationDecomposition::product() const {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (const Factor& f : factors) m = m * primitive_matrix(f.kind, f.angle);
  return m;
}

RotationDecomposition decompose(NamedGate gate, int depth, int sign) {
  switch (gate) {
    case NamedGate::Identity: return {};
    case NamedGate::Hadamard: return {{{Primitive::Rotation, M_PI / 4}, {Primitive::Phase1, M_PI}}};
    case NamedGate::Not: return {{{Primitive::Rotation, M_PI / 2}, {Primitive::Phase1, M_PI}}};
    case NamedGate::Phase: return {{{Primitive::Phase1, sign * M_PI / std::ldexp(1.0, depth)}}};
  }
  throw ContractViolation("decompose: unknown gate");
}

bool decompose(const GateOp& g, RotationDecomposition& out) {
  switch (g.kind) {
    case GateKind::Hadamard: out = decompose(NamedGate::Hadamard); return true;
    case GateKind::Not:
    case GateKind::OracleNot: out = decompose(NamedGate::Not); return true;
    case GateKind::Phase:
    case GateKind::ControlledPhase: out = decompose(NamedGate::Phase, g.depth, g.sign); return true;
    default: return false;
  }
}

GateMatrix perturb(const RotationDecomposition& d, double sigma, Rng& rng) {
  RotationDecomposition noisy = d;
  for (Factor& f : noisy.factors) f.angle += rng.normal(sigma);
  // Products of exact rotations and phases; rounding stays far below 1e-12.
  return GateMatrix(noisy.product(), UnitaryCheck::Off);
}

std::uint64_t inject_depolarizing(StateVector& s, std::span<const int> qubits, double p, Rng& rng, int workers) {
  if (p == 0.0) return 0;
  std::uint64_t events = 0;
  for (int q : qubits) {
    if (rng.uniform() >= p) continue;
    ++events;
    const double which = rng.uniform();
    if (which < 1.0 / 3.0)
      apply_single(s, gates::pauli_x(), q, workers);
    else if (which < 2.0 / 3.0)
      apply_single(s, gates::pauli_y(), q, workers);
    else
      apply_single(s, gates::pauli_z(), q, workers);
  }
  return events;
}

double analytic_ht_depolarizing(int n, double p, int k) {
  detail::require(k >= 0 && k % 2 == 0, "analytic decay needs an even iteration count");
  detail::require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  return std::pow((1.0 + std::pow(1.0 - 4.0 * p / 3.0, k)) / 2.0, n);
}

double analytic_ht_operational(int n, double sigma, int k) {
  detail::require(k >= 0 && k % 2 == 0, "analytic decay needs an even iteration count");
  return std::pow((1.0 + std::exp(-sigma * sigma / 4.0 * 9.0 * k)) / 2.0, n);
}

void RunningStat::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningStat::merge(const RunningStat& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double total = static_cast<double>(count + o.count);
  const double delta = o.mean - mean;
  mean += delta * static_cast<double>(o.count) / total;
  m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
  count += o.count;
}

const Series& TrajectoryStats::at(const std::string& name) const {
  for (const Series& s : series)
    if (s.name == name) return s;
  throw std::out_of_range("no observable named " + name);
}

void TrajectoryStats::merge(const TrajectoryStats& other) {
  if (series.empty()) {
    *this = other;
    return;
  }
  detail::require(series.size() == other.series.size(), "merge: observable sets differ");
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t j = 0; j < series[i].points.size(); ++j) series[i].points[j].merge(other.series[i].points.at(j));
  trials += other.trials;
}

void NoisyExecutor::apply(StateVector& s, const GateOp& g, bool injection_point) {
  RotationDecomposition d;
  if (cfg_.sigma > 0.0 && decompose(g, d))
    apply_gate(s, g, perturb(d, cfg_.sigma, rng_), workers_);
  else
    apply_gate(s, g, nominal_matrix(g), workers_);

  if (granularity_ == Granularity::PerGate && injection_point && cfg_.p > 0.0) {
    const std::vector<int> qs = g.touched();
    pauli_events_ += inject_depolarizing(s, qs, cfg_.p, rng_, workers_);
  }
}

void NoisyExecutor::run(StateVector& s, std::span<const GateOp> circuit, bool injection_points) {
  for (const GateOp& g : circuit) apply(s, g, injection_points);
}

void NoisyExecutor::end_iteration(StateVector& s) {
  if (granularity_ != Granularity::PerIteration || cfg_.p == 0.0) return;
  std::vector<int> all(static_cast<std::size_t>(s.qubits()));
  std::iota(all.begin(), all.end(), 0);
  pauli_events_ += inject_depolarizing(s, all, cfg_.p, rng_, workers_);
}

namespace {

Granularity effective(const Experiment& e, const NoiseConfig& cfg) {
  return cfg.granularity == Granularity::ExperimentDefault ? e.default_granularity() : cfg.granularity;
}

}  // namespace

std::vector<std::vector<double>> run_single_trial(const Experiment& experiment, const NoiseConfig& cfg,
                                                  std::uint64_t trial, int workers) {
  cfg.validate();
  Rng rng = Rng::derive(cfg.seed, trial);
  NoisyExecutor exec(cfg, effective(experiment, cfg), rng, workers);
  return experiment.run_trial(exec);
}

TrajectoryStats run_trajectories(const Experiment& experiment, const NoiseConfig& cfg, std::uint64_t trials,
                                 int workers) {
  detail::require(trials >= 1, "need at least one trial");
  cfg.validate();
  TrajectoryStats stats;
  for (const std::string& name : experiment.observables())
    stats.series.push_back({name, std::vector<RunningStat>(experiment.points())});
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto values = run_single_trial(experiment, cfg, t, workers);
    for (std::size_t o = 0; o < stats.series.size(); ++o)
      for (std::size_t i = 0; i < stats.series[o].points.size(); ++i) stats.series[o].points[i].add(values[o][i]);
  }
  stats.trials = trials;
  return stats;
}

}  // namespace pqsim
