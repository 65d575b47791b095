// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes when
// its check holds and it finishes inside its runtime cap. Pass criterion
// numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pqsim/circuits.hpp"
#include "pqsim/experiments.hpp"
#include "pqsim/fft.hpp"
#include "pqsim/harness.hpp"
#include "pqsim/shor.hpp"
#include "support.hpp"

using namespace pqsim;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double cap_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome kernel_oracle() {
  Rng rng(2024);
  double worst = 0;
  for (int c = 0; c < 200; ++c) {
    const int n = 1 + static_cast<int>(rng.between(0, 9));
    const int target = static_cast<int>(rng.between(0, n - 1));
    std::vector<Control> controls;
    for (int q = 0; q < n; ++q)
      if (q != target && rng.uniform() < 0.3) controls.push_back({q, rng.uniform() < 0.5});
    const GateMatrix u = test::random_unitary(rng);
    StateVector s = test::random_normalized(n, 1000 + c);
    const test::Dense op = test::explicit_operator(n, u, target, controls);
    const Eigen::VectorXcd expect = op * s.amplitudes();
    apply_controlled(s, u, controls, target, 1 + static_cast<int>(rng.between(0, 3)));
    worst = std::max(worst, (s.amplitudes() - expect).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max |diff| " + fmt("%.3g", worst) + " over 200 cases (tol 1e-12)"};
}

Outcome worker_independence() {
  const StateVector input = random_state(20, 77);
  bool all = true;
  for (const bool qft : {false, true}) {
    StateVector ref = input;
    qft ? qft_circuit(ref, std::nullopt, 1) : hadamard_all(ref, 1);
    for (int w : {2, 4, 8}) {
      StateVector s = input;
      qft ? qft_circuit(s, std::nullopt, w) : hadamard_all(s, w);
      all = all && test::bit_identical(ref, s);
    }
  }
  return {all, all ? "HT and QFT, n=20, workers 1/2/4/8 bit-identical" : "amplitudes differ across worker counts"};
}

Outcome qft_vs_fft() {
  double worst = 0;
  for (int n = 8; n <= 20; ++n) {
    const StateVector input = random_state(n, static_cast<std::uint64_t>(n));
    StateVector a = input, b = input;
    qft_circuit(a, std::nullopt, 1);
    qft_fft(b, 1);
    worst = std::max(worst, test::max_abs_diff(a, b));
  }
  return {worst <= 1e-13, "max |diff| " + fmt("%.3g", worst) + " for n=8..20 (tol 1e-13)"};
}

Outcome ht_decay(bool operational) {
  const int n = 10, trials = 2000;
  const HtDecayExperiment exp(n, 100);
  const std::vector<double> levels = operational ? std::vector<double>{1e-3, 1e-2} : std::vector<double>{1e-4, 1e-3, 1e-2};
  int outside = 0, points = 0;
  double worst_z = 0;
  for (double level : levels) {
    NoiseConfig cfg;
    (operational ? cfg.sigma : cfg.p) = level;
    cfg.seed = 1;
    const TrajectoryStats st = run_trajectories(exp, cfg, trials, 1);
    for (std::size_t i = 0; i < exp.points(); ++i) {
      const int k = exp.k_at(i);
      const double expect = operational ? analytic_ht_operational(n, level, k) : analytic_ht_depolarizing(n, level, k);
      const double diff = std::abs(st.mean("prob_zero", i) - expect);
      const double se = st.standard_error("prob_zero", i);
      ++points;
      if (diff > 3 * se) {
        ++outside;
        std::printf("  note: %s=%g k=%d mean %.6f analytic %.6f se %.3g\n", operational ? "sigma" : "p", level, k,
                    st.mean("prob_zero", i), expect, se);
      }
      if (se > 0) worst_z = std::max(worst_z, diff / se);
    }
  }
  return {outside == 0, std::to_string(points - outside) + "/" + std::to_string(points) +
                            " points within 3 SE, worst " + fmt("%.2f", worst_z) + " SE"};
}

Outcome shor_theory() {
  const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, double>> rows = {
      {21311, 211, 101, 15.79}, {21733, 211, 103, 15.85}, {22999, 211, 109, 16.00}, {22523, 223, 101, 15.88},
      {22927, 227, 101, 15.91}, {22969, 223, 103, 15.94}, {23129, 229, 101, 15.92}};
  double worst = 0;
  for (const auto& [n, p, q, expect] : rows) worst = std::max(worst, std::abs(1.0 / prob_succ(n, (p - 1) * (q - 1)) - expect));
  return {worst <= 0.02, "max |1/Prob_succ - expected| " + fmt("%.4f", worst) + " over 7 N (tol 0.02)"};
}

Outcome shor_small() {
  std::set<std::uint64_t> found;
  bool gate_ok = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ShorConfig cfg;
    cfg.modulus = 15;
    cfg.mode = OrderFindMode::GateLevel;
    cfg.base = 11;
    cfg.workers = 1;
    Rng rng(seed);
    const ShorStats st = shor_factor(cfg, rng);
    if (!st.succeeded()) {
      gate_ok = false;
      continue;
    }
    found.insert(st.factor);
    found.insert(15 / st.factor);
  }
  gate_ok = gate_ok && found == std::set<std::uint64_t>{3, 5};

  int successes = 0, worst = 0;
  const std::vector<std::uint64_t> moduli = {143, 221, 323, 437, 899};
  for (std::uint64_t n : moduli) {
    for (std::uint64_t run = 0; run < 20; ++run) {
      ShorConfig cfg;
      cfg.modulus = n;
      cfg.max_iterations = 50;
      cfg.workers = 1;
      Rng rng = Rng::derive(n, run);
      const ShorStats st = shor_factor(cfg, rng);
      if (st.succeeded() && n % st.factor == 0) ++successes;
      worst = std::max(worst, st.iterations);
    }
  }
  const bool semantic_ok = successes == 100;
  return {gate_ok && semantic_ok, std::string("gate-level N=15 x=11 factors ") + (gate_ok ? "{3,5}" : "wrong") +
                                      "; semantic 143/221/323/437/899: " + std::to_string(successes) +
                                      "/100 factored, max " + std::to_string(worst) + " iterations (cap 50)"};
}

Outcome shor_improvements() {
  const std::uint64_t n = 3127;  // 53 * 59
  double original = 0, improved = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    for (const unsigned mask : {0u, improvements::kAll}) {
      ShorConfig cfg;
      cfg.modulus = n;
      cfg.post.improvements = mask;
      cfg.workers = 1;
      Rng rng = Rng::derive(7, run);
      const ShorStats st = shor_factor(cfg, rng);
      (mask ? improved : original) += st.iterations;
    }
  }
  original /= 100;
  improved /= 100;
  return {improved < original, "N=3127: original " + fmt("%.2f", original) + ", improved " + fmt("%.2f", improved) +
                                   " mean iterations (ratio " + fmt("%.2f", improved / original) + ")"};
}

Outcome grover_noiseless() {
  const int n = 10;
  Rng rng(1);
  const GroverResult r = grover_search(n, 611, 80, true, rng, 1);
  const double theta = std::asin(std::ldexp(1.0, -n / 2));
  double worst = 0;
  for (int j = 1; j <= 80; ++j) worst = std::max(worst, std::abs(r.trace[j - 1] - std::sin((2 * j + 1) * theta)));
  StateVector s(grover_qubits(n, true));
  execute(s, grover_prepare_gates(n, true), 1);
  for (int j = 0; j < 25; ++j) grover_iteration(s, 611, true, 1);
  const double p25 = grover_target_probability(s, 611, true);
  return {worst <= 1e-10 && p25 >= 0.99,
          "max |amp - sin| " + fmt("%.3g", worst) + " over 80 iterations (tol 1e-10); P(j=25) " + fmt("%.5f", p25)};
}

std::size_t argmax(const TrajectoryStats& st, std::size_t points) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < points; ++j)
    if (st.mean("target_amplitude", j) > st.mean("target_amplitude", best)) best = j;
  return best;
}

Outcome grover_noise() {
  const int n = 10, iterations = 40;
  const GroverCurveExperiment exp(n, 611, iterations);
  NoiseConfig clean;
  const TrajectoryStats ideal = run_trajectories(exp, clean, 1, 1);
  const std::size_t peak = argmax(ideal, exp.points());

  NoiseConfig dep;
  dep.p = 1e-2;
  dep.seed = 3;
  const TrajectoryStats d = run_trajectories(exp, dep, 1000, 1);
  const double reduction = 1.0 - d.mean("target_amplitude", peak) / ideal.mean("target_amplitude", peak);

  NoiseConfig op;
  op.sigma = 1e-3;
  op.seed = 4;
  const TrajectoryStats o = run_trajectories(exp, op, 1000, 1);
  const std::size_t noisy_peak = argmax(o, exp.points());
  return {reduction >= 0.2 && noisy_peak == peak,
          "p=1e-2 cuts the peak amplitude at j=" + std::to_string(peak) + " by " + fmt("%.1f", 100 * reduction) +
              "% (need >= 20%); sigma=1e-3 peak at j=" + std::to_string(noisy_peak)};
}

Outcome performance() {
  StateVector s = random_state(20, 5);
  const double circuit = median_seconds([&] { qft_circuit(s, std::nullopt, 1); }, 3);
  const double fft = median_seconds([&] { qft_fft(s, 1); }, 3);
  const double ratio = circuit / fft;
  const unsigned cores = std::thread::hardware_concurrency();
  std::string detail = "circuit/FFT at n=20 " + fmt("%.1f", ratio) + "x (need >= 5)";
  bool ok = ratio >= 5;
  if (cores >= 4) {
    const auto rows = bench_speedup(ExperimentKind::HtBench, 24, {1, 4}, 5);
    const double speedup = rows.back().speedup;
    detail += "; HT n=24 speedup at 4 workers " + fmt("%.2f", speedup) + " (need >= 2)";
    ok = ok && speedup >= 2;
  } else {
    detail += "; HT speedup not applicable on " + std::to_string(cores) + " core(s)";
  }
  return {ok, detail};
}

Outcome memory_accounting() {
  bool exact = true;
  for (int n = 1; n <= 30; ++n) exact = exact && memory_bytes(n) == (std::uint64_t{1} << (n + 4));
  bool refused = false;
  std::string message;
  try {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::HtDecay;
    spec.n = {22};
    spec.memory_budget = memory_bytes(21);
    run_experiment(spec);
  } catch (const BudgetError& e) {
    message = e.what();
    refused = message.find(std::to_string(memory_bytes(22))) != std::string::npos;
  }
  return {exact && refused, std::string("2^(n+4) for n=1..30 ") + (exact ? "exact" : "WRONG") + "; refusal: \"" +
                                message + "\""};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "kernel oracle equivalence", 60, kernel_oracle},
      {2, "worker independence", 60, worker_independence},
      {3, "QFT circuit vs FFT", 120, qft_vs_fft},
      {4, "HT depolarizing decay", 600, [] { return ht_decay(false); }},
      {5, "HT operational decay", 600, [] { return ht_decay(true); }},
      {6, "Shor theoretical iterations", 1, shor_theory},
      {7, "Shor end-to-end small", 300, shor_small},
      {8, "Shor improvements effect", 600, shor_improvements},
      {9, "Grover noiseless curve", 60, grover_noiseless},
      {10, "Grover noise qualitative", 900, grover_noise},
      {11, "performance properties", 600, performance},
      {12, "memory accounting", 1, memory_accounting},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.cap_seconds;
    const bool pass = out.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.1f s, cap %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs, c.cap_seconds, in_time ? "" : ", over cap");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
