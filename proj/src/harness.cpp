#include "pqsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pqsim/circuits.hpp"
#include "pqsim/experiments.hpp"
#include "pqsim/fft.hpp"

namespace pqsim {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::HtDecay, "ht-decay"},   {ExperimentKind::QftFidelity, "qft-fidelity"},
    {ExperimentKind::GroverCurve, "grover-curve"}, {ExperimentKind::Shor, "shor"},
    {ExperimentKind::QftBench, "qft-bench"}, {ExperimentKind::HtBench, "ht-bench"},
    {ExperimentKind::GateMicrobench, "gate-microbench"},
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& columns) { row(columns); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string num(double v) { return format_double(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(unsigned v) { return std::to_string(v); }

int register_qubits(const ExperimentSpec& spec, int n) {
  switch (spec.kind) {
    case ExperimentKind::GroverCurve: return grover_qubits(n, spec.ancilla);
    default: return n;
  }
}

void check_budgets(const ExperimentSpec& spec) {
  if (spec.kind == ExperimentKind::Shor) {
    for (std::uint64_t m : spec.modulus) {
      const int l = bit_length(m);
      check_budget(spec.mode == OrderFindMode::GateLevel ? 3 * l : 2 * l, spec.memory_budget);
    }
    return;
  }
  for (int n : spec.n) check_budget(register_qubits(spec, n), spec.memory_budget);
}

NoiseConfig noise_for(const ExperimentSpec& spec, double p, double sigma) {
  NoiseConfig cfg;
  cfg.p = p;
  cfg.sigma = sigma;
  cfg.granularity = spec.granularity;
  cfg.seed = spec.seed;
  return cfg;
}

std::string ht_decay(const ExperimentSpec& spec) {
  CsvWriter csv(csv_columns(spec.kind));
  for (int n : spec.n)
    for (double p : spec.p)
      for (double sigma : spec.sigma) {
        const HtDecayExperiment exp(n, spec.k);
        const TrajectoryStats stats = run_trajectories(exp, noise_for(spec, p, sigma), spec.trials, spec.workers.front());
        for (std::size_t i = 0; i < exp.points(); ++i) {
          const int k = exp.k_at(i);
          std::string analytic;
          if (sigma == 0.0)
            analytic = num(analytic_ht_depolarizing(n, p, k));
          else if (p == 0.0)
            analytic = num(analytic_ht_operational(n, sigma, k));
          const RunningStat& st = stats.at("prob_zero").points[i];
          csv.row({num(n), num(p), num(sigma), num(k), num(spec.trials), num(st.mean), num(st.standard_error()),
                   analytic});
        }
      }
  return csv.str();
}

StateVector fidelity_input(const ExperimentSpec& spec, int n) {
  if (spec.input == "random") return random_state(n, spec.seed);
  if (spec.input == "comb") return comb_state(n, 3, 1);
  if (spec.input == "basis") return StateVector::basis(n, 1);
  throw ContractViolation("unknown qft-fidelity input: " + spec.input);
}

std::string qft_fidelity(const ExperimentSpec& spec) {
  CsvWriter csv(csv_columns(spec.kind));
  for (int n : spec.n)
    for (const std::optional<int>& bound : spec.approx_bound) {
      const QftFidelityExperiment exp(fidelity_input(spec, n), bound);
      for (double p : spec.p)
        for (double sigma : spec.sigma) {
          const TrajectoryStats stats =
              run_trajectories(exp, noise_for(spec, p, sigma), spec.trials, spec.workers.front());
          const RunningStat& st = stats.at("fidelity").points[0];
          csv.row({num(n), bound ? num(*bound) : std::string("exact"), num(p), num(sigma), num(spec.trials),
                   num(st.mean), num(st.standard_error())});
        }
    }
  return csv.str();
}

std::string grover_curve(const ExperimentSpec& spec) {
  CsvWriter csv(csv_columns(spec.kind));
  for (int n : spec.n) {
    const std::uint64_t size = std::uint64_t{1} << n;
    const std::uint64_t target = spec.target.value_or((size - 1) / 3);
    detail::require(target < size, "grover target out of range");
    const int iterations = spec.iterations.value_or(grover_default_iterations(n));
    const GroverCurveExperiment exp(n, target, iterations, spec.ancilla);
    const double theta = std::asin(std::sqrt(std::ldexp(1.0, -n)));
    for (double p : spec.p)
      for (double sigma : spec.sigma) {
        const TrajectoryStats stats = run_trajectories(exp, noise_for(spec, p, sigma), spec.trials, spec.workers.front());
        for (std::size_t j = 0; j < exp.points(); ++j) {
          const RunningStat& a = stats.at("target_amplitude").points[j];
          const RunningStat& pr = stats.at("target_probability").points[j];
          csv.row({num(n), num(target), num(p), num(sigma), num(static_cast<int>(j)), num(spec.trials), num(a.mean),
                   num(a.standard_error()), num(pr.mean), num(pr.standard_error()),
                   num(std::sin((2.0 * static_cast<double>(j) + 1.0) * theta))});
        }
      }
  }
  return csv.str();
}

std::string shor(const ExperimentSpec& spec) {
  CsvWriter csv(csv_columns(spec.kind));
  for (std::uint64_t m : spec.modulus) {
    std::uint64_t phi = 0;
    if (spec.factor_p && spec.factor_q && *spec.factor_p * *spec.factor_q == m)
      phi = (*spec.factor_p - 1) * (*spec.factor_q - 1);
    else
      phi = euler_phi(m);
    const std::string theoretical = m >= 16 ? num(1.0 / prob_succ(m, phi)) : std::string();

    for (double p : spec.p)
      for (double sigma : spec.sigma)
        for (unsigned mask : spec.improvements) {
          ShorConfig cfg;
          cfg.modulus = m;
          cfg.mode = spec.mode;
          cfg.post.improvements = mask;
          cfg.max_iterations = spec.max_iterations;
          cfg.memory_budget = spec.memory_budget;
          cfg.workers = spec.workers.front();
          if (p > 0.0 || sigma > 0.0) cfg.noise = noise_for(spec, p, sigma);

          RunningStat iterations;
          ShorTallies tallies;
          std::uint64_t successes = 0, first_factor = 0;
          for (std::uint64_t run = 0; run < spec.trials; ++run) {
            Rng rng = Rng::derive(spec.seed, run);  // same stream per run index: paired across masks
            const ShorStats st = shor_factor(cfg, rng);
            iterations.add(st.iterations);
            if (st.succeeded()) {
              ++successes;
              if (first_factor == 0) first_factor = std::min(st.factor, m / st.factor);
            }
            for (const Check c : {Check::Neighbor, Check::Gcd, Check::SmallFactor, Check::Lcm}) {
              tallies[c].success += st.tallies[c].success;
              tallies[c].failure += st.tallies[c].failure;
            }
          }
          csv.row({num(m), to_string(spec.mode), num(mask), num(p), num(sigma), num(spec.trials), num(successes),
                   num(iterations.mean), num(iterations.standard_error()), theoretical,
                   first_factor ? num(first_factor) : std::string(), num(tallies.neighbor.success),
                   num(tallies.neighbor.failure), num(tallies.gcd.success), num(tallies.gcd.failure),
                   num(tallies.small_factor.success), num(tallies.small_factor.failure), num(tallies.lcm.success),
                   num(tallies.lcm.failure)});
        }
  }
  return csv.str();
}

std::vector<int> with_baseline(std::vector<int> workers) {
  if (std::find(workers.begin(), workers.end(), 1) == workers.end()) workers.insert(workers.begin(), 1);
  return workers;
}

double time_workload(ExperimentKind kind, int n, int workers, int repeats, bool fft = false) {
  StateVector s(n);
  switch (kind) {
    case ExperimentKind::HtBench: return median_seconds([&] { hadamard_all(s, workers); }, repeats);
    case ExperimentKind::QftBench:
      if (fft) return median_seconds([&] { qft_fft(s, workers); }, repeats);
      return median_seconds([&] { qft_circuit(s, std::nullopt, workers); }, repeats);
    case ExperimentKind::GateMicrobench: {
      const GateMatrix h = gates::hadamard();
      return median_seconds(
                 [&] {
                   for (int q = 0; q < n; ++q) apply_single(s, h, q, workers);
                 },
                 repeats) /
             n;
    }
    default: throw ContractViolation("not a benchmark kind: " + to_string(kind));
  }
}

std::string bench(const ExperimentSpec& spec) {
  CsvWriter csv(csv_columns(spec.kind));
  const std::vector<int> all = with_baseline(spec.workers);
  for (int n : spec.n) {
    if (spec.kind == ExperimentKind::QftBench) {
      std::vector<double> circuit, fast;
      for (int w : all) {
        circuit.push_back(time_workload(spec.kind, n, w, spec.repeats, false));
        fast.push_back(time_workload(spec.kind, n, w, spec.repeats, true));
      }
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (std::find(spec.workers.begin(), spec.workers.end(), all[i]) == spec.workers.end()) continue;
        csv.row({num(n), num(all[i]), num(circuit[i]), num(fast[i]), num(circuit[i] / fast[i]),
                 num(circuit[0] / circuit[i]), num(fast[0] / fast[i])});
      }
      continue;
    }
    for (const SpeedupRow& r : bench_speedup(spec.kind, n, spec.workers, spec.repeats))
      csv.row({num(n), num(r.workers), num(r.seconds), num(r.speedup)});
  }
  return csv.str();
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const KindName& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (const KindName& k : kKindNames)
    if (text == k.name) return k.kind;
  throw ContractViolation("unknown experiment kind: " + text);
}

Granularity parse_granularity(const std::string& text) {
  if (text == "default" || text.empty()) return Granularity::ExperimentDefault;
  if (text == "gate") return Granularity::PerGate;
  if (text == "iteration") return Granularity::PerIteration;
  throw ContractViolation("unknown granularity: " + text + " (default | gate | iteration)");
}

void ExperimentSpec::validate() const {
  detail::require(!workers.empty() && !p.empty() && !sigma.empty(), "sweep lists must be non-empty");
  for (int w : workers) detail::require(w >= 1, "workers must be positive");
  for (double v : p) detail::require(v >= 0.0 && v <= 1.0, "p must lie in [0, 1]");
  for (double v : sigma) detail::require(v >= 0.0, "sigma must be non-negative");
  detail::require(trials >= 1, "trials must be positive");
  detail::require(repeats >= 1, "repeats must be positive");
  if (kind == ExperimentKind::Shor) {
    detail::require(!modulus.empty(), "shor needs at least one N");
    detail::require(!improvements.empty(), "improvements list must be non-empty");
    return;
  }
  detail::require(!n.empty(), "n list must be non-empty");
  for (int v : n) {
    if (v < 1 || register_qubits(*this, v) > kMaxQubits)
      throw SizeError("n=" + std::to_string(v) + " is outside 1.." + std::to_string(kMaxQubits) + " qubits");
  }
  if (kind == ExperimentKind::HtDecay) detail::require(k >= 2, "ht-decay needs k >= 2");
  if (kind == ExperimentKind::QftFidelity) detail::require(!approx_bound.empty(), "bound list must be non-empty");
}

std::vector<std::string> csv_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::HtDecay: return {"n", "p", "sigma", "k", "trials", "prob_zero", "stderr", "analytic"};
    case ExperimentKind::QftFidelity: return {"n", "bound", "p", "sigma", "trials", "fidelity", "stderr"};
    case ExperimentKind::GroverCurve:
      return {"n", "target", "p", "sigma", "iteration", "trials", "amplitude", "amplitude_stderr", "probability",
              "probability_stderr", "noiseless_amplitude"};
    case ExperimentKind::Shor:
      return {"N", "mode", "improvements", "p", "sigma", "runs", "successes", "mean_iterations", "stderr",
              "theoretical_iterations", "factor", "neighbor_s", "neighbor_f", "gcd_s", "gcd_f", "small_factor_s",
              "small_factor_f", "lcm_s", "lcm_f"};
    case ExperimentKind::QftBench:
      return {"n", "workers", "circuit_seconds", "fft_seconds", "circuit_over_fft", "circuit_speedup", "fft_speedup"};
    case ExperimentKind::HtBench:
    case ExperimentKind::GateMicrobench: return {"n", "workers", "seconds", "speedup"};
  }
  return {};
}

std::string run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  check_budgets(spec);
  switch (spec.kind) {
    case ExperimentKind::HtDecay: return ht_decay(spec);
    case ExperimentKind::QftFidelity: return qft_fidelity(spec);
    case ExperimentKind::GroverCurve: return grover_curve(spec);
    case ExperimentKind::Shor: return shor(spec);
    case ExperimentKind::QftBench:
    case ExperimentKind::HtBench:
    case ExperimentKind::GateMicrobench: return bench(spec);
  }
  return {};
}

double median_seconds(const std::function<void()>& fn, int repeats) {
  detail::require(repeats >= 1, "repeats must be positive");
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t.size() % 2 ? t[t.size() / 2] : 0.5 * (t[t.size() / 2 - 1] + t[t.size() / 2]);
}

std::vector<SpeedupRow> bench_speedup(ExperimentKind kind, int n, const std::vector<int>& workers, int repeats) {
  const std::vector<int> all = with_baseline(workers);
  std::vector<double> seconds;
  for (int w : all) seconds.push_back(time_workload(kind, n, w, repeats));
  std::vector<SpeedupRow> rows;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (std::find(workers.begin(), workers.end(), all[i]) == workers.end()) continue;
    rows.push_back({all[i], seconds[i], all[i] == 1 ? 1.0 : seconds[0] / seconds[i]});
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace pqsim
