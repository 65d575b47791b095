// pqsim: batch experiments and benchmarks, CSV on stdout or --out.
//
//   pqsim ht-decay --n 10 --p 1e-3,1e-2 --k 100 --trials 2000
//   pqsim shor --N 3127 --improvements 0,15 --trials 100
//   pqsim bench --kind qft --n 20,22 --workers 1,2,4
//   pqsim ht-decay --config run.ini      (key=value lines, same names as flags)

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqsim/harness.hpp"

namespace {

struct Args {
  std::vector<int> n{10};
  std::vector<double> p{0.0};
  std::vector<double> sigma{0.0};
  std::vector<int> workers;
  std::vector<std::uint64_t> modulus;
  std::vector<std::string> improvements{"0"};
  std::vector<std::string> bound{"exact"};
  int k = 100;
  int iterations = -1;
  long long target = -1;
  std::string oracle = "ancilla";
  std::string input = "random";
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string granularity = "default";
  std::string mode = "semantic";
  int max_iterations = 1000;
  std::uint64_t factor_p = 0, factor_q = 0;
  std::string kind = "qft";
  int repeats = 5;
  std::uint64_t memory_budget = pqsim::kDefaultMemoryBudget;
  std::string out;
};

pqsim::ExperimentSpec to_spec(const std::string& command, const Args& a) {
  using pqsim::ExperimentKind;
  pqsim::ExperimentSpec spec;
  spec.kind = command == "bench" ? pqsim::parse_experiment_kind(a.kind + (a.kind == "gate" ? "-microbench" : "-bench"))
                                 : pqsim::parse_experiment_kind(command);
  spec.n = a.n;
  spec.p = a.p;
  spec.sigma = a.sigma;
  if (!a.workers.empty())
    spec.workers = a.workers;
  else if (spec.kind == ExperimentKind::QftBench || spec.kind == ExperimentKind::HtBench ||
           spec.kind == ExperimentKind::GateMicrobench)
    spec.workers = {1, 2, 4};
  else
    spec.workers = {pqsim::default_workers()};
  spec.modulus = a.modulus;
  spec.improvements.clear();
  for (const std::string& s : a.improvements) spec.improvements.push_back(pqsim::parse_improvements(s));
  spec.approx_bound.clear();
  for (const std::string& b : a.bound) {
    if (b == "exact")
      spec.approx_bound.push_back(std::nullopt);
    else
      spec.approx_bound.push_back(std::stoi(b));
  }
  spec.k = a.k;
  if (a.iterations >= 0) spec.iterations = a.iterations;
  if (a.target >= 0) spec.target = static_cast<std::uint64_t>(a.target);
  if (a.oracle != "ancilla" && a.oracle != "phase-flip")
    throw pqsim::ContractViolation("--oracle must be ancilla or phase-flip");
  spec.ancilla = a.oracle == "ancilla";
  spec.input = a.input;
  spec.trials = a.trials;
  spec.seed = a.seed;
  spec.granularity = pqsim::parse_granularity(a.granularity);
  spec.mode = pqsim::parse_order_find_mode(a.mode);
  spec.max_iterations = a.max_iterations;
  if (a.factor_p) spec.factor_p = a.factor_p;
  if (a.factor_q) spec.factor_q = a.factor_q;
  spec.repeats = a.repeats;
  spec.memory_budget = a.memory_budget;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel state-vector simulator: noise, QFT, Grover and Shor experiments as CSV"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file");

  Args a;
  app.add_option("--n", a.n, "Qubit counts")->delimiter(',');
  app.add_option("--p", a.p, "Depolarizing probabilities")->delimiter(',');
  app.add_option("--sigma", a.sigma, "Operational-error standard deviations (radians)")->delimiter(',');
  app.add_option("--workers", a.workers, "Kernel worker counts")->delimiter(',');
  app.add_option("--N", a.modulus, "Shor: numbers to factor")->delimiter(',');
  app.add_option("--improvements", a.improvements,
                 "Shor: check sets to compare (bitmask 0-15, none, all, or neighbor+gcd+small-factor+lcm)")
      ->delimiter(',');
  app.add_option("--bound", a.bound, "QFT fidelity: approximation bounds, or exact")->delimiter(',');
  app.add_option("--k", a.k, "HT decay: largest iteration count");
  app.add_option("--iterations", a.iterations, "Grover: iteration count (default floor(pi/4 sqrt(2^n)))");
  app.add_option("--target", a.target, "Grover: marked element");
  app.add_option("--oracle", a.oracle, "Grover: ancilla or phase-flip");
  app.add_option("--input", a.input, "QFT fidelity input state: random, comb or basis");
  app.add_option("--trials", a.trials, "Trajectories per point, or Shor runs");
  app.add_option("--seed", a.seed, "Master seed");
  app.add_option("--granularity", a.granularity, "Noise injection: default, gate or iteration");
  app.add_option("--mode", a.mode, "Shor order finding: semantic or gate-level");
  app.add_option("--max-iterations", a.max_iterations, "Shor: iteration cap per run");
  app.add_option("--factor-p", a.factor_p, "Shor: known prime factor p (for phi)");
  app.add_option("--factor-q", a.factor_q, "Shor: known prime factor q (for phi)");
  app.add_option("--kind", a.kind, "Bench workload: qft, ht or gate");
  app.add_option("--repeats", a.repeats, "Bench: timings per point (median reported)");
  app.add_option("--memory-budget", a.memory_budget, "Largest register allocation in bytes");
  app.add_option("--out", a.out, "Output CSV path (default stdout)");

  for (const char* name : {"ht-decay", "qft-fidelity", "grover-curve", "shor", "bench"})
    app.add_subcommand(name)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const std::string csv = pqsim::run_experiment(to_spec(command, a));
    if (a.out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(a.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open " + a.out);
      f << csv;
    }
  } catch (const pqsim::BudgetError& e) {
    std::cerr << "pqsim: refused: " << e.what() << '\n';
    return 3;
  } catch (const pqsim::SizeError& e) {
    std::cerr << "pqsim: refused: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "pqsim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
