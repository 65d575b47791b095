#pragma once

// Composite circuits built from the kernels. Builders return plain gate lists
// (pure, shareable); execution walks the list through the kernels, and the
// noise module walks the same lists with perturbed gates.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pqsim/errors.hpp"
#include "pqsim/fft.hpp"
#include "pqsim/kernels.hpp"
#include "pqsim/random.hpp"
#include "pqsim/statevec.hpp"

namespace pqsim {

enum class GateKind {
  Hadamard,
  Not,
  Phase,            // R_d on target
  ControlledPhase,  // R_d on target, control qubit must be 1
  Swap,
  OracleNot,        // NOT on target iff value of `range` == marked
  PhaseFlip,        // negate amplitudes whose `range` value == marked
  GlobalPhase,      // multiply by -1
};

struct GateOp {
  GateKind kind = GateKind::Hadamard;
  int target = 0;
  int control = -1;
  int other = -1;  // swap partner
  int depth = 0;   // d of R_d
  int sign = 1;    // -1 for R_d adjoint
  QubitRange range{};
  std::uint64_t marked = 0;

  static GateOp h(int q) { return {.kind = GateKind::Hadamard, .target = q}; }
  static GateOp x(int q) { return {.kind = GateKind::Not, .target = q}; }
  static GateOp cr(int d, int ctrl, int tgt, int sign = 1) {
    return {.kind = GateKind::ControlledPhase, .target = tgt, .control = ctrl, .depth = d, .sign = sign};
  }
  static GateOp swap(int a, int b) { return {.kind = GateKind::Swap, .target = a, .other = b}; }
  static GateOp oracle_not(QubitRange r, std::uint64_t marked, int tgt) {
    return {.kind = GateKind::OracleNot, .target = tgt, .range = r, .marked = marked};
  }
  static GateOp phase_flip(QubitRange r, std::uint64_t marked) {
    return {.kind = GateKind::PhaseFlip, .range = r, .marked = marked};
  }
  static GateOp global_minus() { return {.kind = GateKind::GlobalPhase}; }

  /// Qubits the gate acts on (for per-gate noise injection).
  std::vector<int> touched() const {
    switch (kind) {
      case GateKind::ControlledPhase: return {control, target};
      case GateKind::Swap: return {target, other};
      case GateKind::OracleNot: {
        std::vector<int> qs;
        for (int q = range.first; q < range.first + range.count; ++q) qs.push_back(q);
        qs.push_back(target);
        return qs;
      }
      case GateKind::PhaseFlip: {
        std::vector<int> qs;
        for (int q = range.first; q < range.first + range.count; ++q) qs.push_back(q);
        return qs;
      }
      case GateKind::GlobalPhase: return {};
      default: return {target};
    }
  }
};

using Circuit = std::vector<GateOp>;

/// One line per gate: "H q3", "CR d=2 ctrl=q1 tgt=q0", "SWAP q0 q3", ...
inline std::string describe(const GateOp& g) {
  std::ostringstream os;
  auto range = [&] { os << "q" << g.range.first << "..q" << (g.range.first + g.range.count - 1); };
  switch (g.kind) {
    case GateKind::Hadamard: os << "H q" << g.target; break;
    case GateKind::Not: os << "X q" << g.target; break;
    case GateKind::Phase: os << (g.sign > 0 ? "R" : "Rdg") << " d=" << g.depth << " q" << g.target; break;
    case GateKind::ControlledPhase:
      os << (g.sign > 0 ? "CR" : "CRdg") << " d=" << g.depth << " ctrl=q" << g.control << " tgt=q" << g.target;
      break;
    case GateKind::Swap: os << "SWAP q" << g.target << " q" << g.other; break;
    case GateKind::OracleNot:
      os << "FNOT k=" << g.marked << " ctrl=";
      range();
      os << " tgt=q" << g.target;
      break;
    case GateKind::PhaseFlip:
      os << "PFLIP k=" << g.marked << " on=";
      range();
      break;
    case GateKind::GlobalPhase: os << "GPHASE -1"; break;
  }
  return os.str();
}

inline std::string describe(std::span<const GateOp> circuit) {
  std::string out;
  for (const GateOp& g : circuit) out += describe(g) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Builders

inline Circuit hadamard_gates(QubitRange r) {
  Circuit c;
  for (int q = r.first; q < r.first + r.count; ++q) c.push_back(GateOp::h(q));
  return c;
}

/// QFT on a qubit range. Without a bound: H then CR_d from every less
/// significant qubit at distance d, then swaps that reverse the qubit order so
/// the result is the DFT with omega = e^{+2 pi i / 2^count}. With a bound b,
/// CR_d gates with d > b are dropped.
inline Circuit qft_gates(QubitRange r, std::optional<int> approx_bound = std::nullopt) {
  Circuit c;
  for (int i = 0; i < r.count; ++i) {
    c.push_back(GateOp::h(r.first + i));
    for (int j = i + 1; j < r.count; ++j) {
      const int d = j - i;
      if (approx_bound && d > *approx_bound) continue;
      c.push_back(GateOp::cr(d, r.first + j, r.first + i));
    }
  }
  for (int i = 0; i < r.count / 2; ++i) c.push_back(GateOp::swap(r.first + i, r.first + r.count - 1 - i));
  return c;
}

inline Circuit inverse_qft_gates(QubitRange r, std::optional<int> approx_bound = std::nullopt) {
  Circuit fwd = qft_gates(r, approx_bound);
  Circuit c(fwd.rbegin(), fwd.rend());
  for (GateOp& g : c)
    if (g.kind == GateKind::ControlledPhase || g.kind == GateKind::Phase) g.sign = -g.sign;
  return c;
}

/// Largest R_d depth kept for accuracy eps: ceil(log2(n / eps)).
inline int approx_bound_for_epsilon(int n, double eps) {
  detail::require(eps > 0.0, "epsilon must be positive");
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(n) / eps)));
}

/// H_n on the data qubits; with an ancilla (qubit n) also X, H so that the
/// ancilla holds (|0> - |1>)/sqrt 2.
inline Circuit grover_prepare_gates(int n, bool ancilla) {
  Circuit c = hadamard_gates({0, n});
  if (ancilla) {
    c.push_back(GateOp::x(n));
    c.push_back(GateOp::h(n));
  }
  return c;
}

/// G = -H_n V_{f_0} H_n V_{f_k}. V_f is an f-controlled NOT into the ancilla,
/// or a direct phase flip when there is no ancilla.
inline Circuit grover_iteration_gates(int n, std::uint64_t k, bool ancilla) {
  const QubitRange data{0, n};
  auto oracle = [&](std::uint64_t marked) {
    return ancilla ? GateOp::oracle_not(data, marked, n) : GateOp::phase_flip(data, marked);
  };
  Circuit c;
  c.push_back(oracle(k));
  for (const GateOp& g : hadamard_gates(data)) c.push_back(g);
  c.push_back(oracle(0));
  for (const GateOp& g : hadamard_gates(data)) c.push_back(g);
  c.push_back(GateOp::global_minus());
  return c;
}

// ---------------------------------------------------------------------------
// Execution

template <typename Scalar>
void apply_gate(BasicStateVector<Scalar>& s, const GateOp& g, const BasicGateMatrix<Scalar>& u,
                int workers = default_workers()) {
  const int n = s.qubits();
  switch (g.kind) {
    case GateKind::Hadamard:
    case GateKind::Not:
    case GateKind::Phase: apply_single(s, u, g.target, workers); break;
    case GateKind::ControlledPhase: {
      const Control ctrl[] = {{g.control, true}};
      apply_controlled(s, u, std::span<const Control>(ctrl), g.target, workers);
      break;
    }
    case GateKind::Swap: apply_swap(s, g.target, g.other, workers); break;
    case GateKind::OracleNot: {
      const std::uint64_t marked = g.marked;
      apply_f_controlled(s, u, [marked](std::uint64_t c) { return c == marked; }, g.range, g.target, workers);
      break;
    }
    case GateKind::PhaseFlip: {
      const QubitRange r = g.range;
      const std::uint64_t marked = g.marked;
      apply_phase_flip(
          s, [=](std::uint64_t j) { return subregister_value(j, n, r.first, r.count) == marked; }, workers);
      break;
    }
    case GateKind::GlobalPhase: apply_global_phase(s, std::complex<Scalar>(-1), workers); break;
  }
}

/// Nominal 2x2 matrix of a gate (identity for gates without one).
template <typename Scalar = double>
BasicGateMatrix<Scalar> nominal_matrix(const GateOp& g) {
  switch (g.kind) {
    case GateKind::Hadamard: return gates::hadamard<Scalar>();
    case GateKind::Not:
    case GateKind::OracleNot: return gates::pauli_x<Scalar>();
    case GateKind::Phase:
    case GateKind::ControlledPhase: return gates::phase_rd<Scalar>(g.depth, g.sign);
    default: return gates::identity<Scalar>();
  }
}

template <typename Scalar>
void execute(BasicStateVector<Scalar>& s, std::span<const GateOp> circuit, int workers = default_workers()) {
  for (const GateOp& g : circuit) apply_gate(s, g, nominal_matrix<Scalar>(g), workers);
}

template <typename Scalar>
void hadamard_all(BasicStateVector<Scalar>& s, int workers = default_workers()) {
  execute(s, hadamard_gates({0, s.qubits()}), workers);
}

template <typename Scalar>
void qft_circuit(BasicStateVector<Scalar>& s, QubitRange r, std::optional<int> approx_bound = std::nullopt,
                 int workers = default_workers()) {
  execute(s, qft_gates(r, approx_bound), workers);
}

template <typename Scalar>
void qft_circuit(BasicStateVector<Scalar>& s, std::optional<int> approx_bound = std::nullopt,
                 int workers = default_workers()) {
  qft_circuit(s, QubitRange{0, s.qubits()}, approx_bound, workers);
}

template <typename Scalar>
void inverse_qft_circuit(BasicStateVector<Scalar>& s, std::optional<int> approx_bound = std::nullopt,
                         int workers = default_workers()) {
  execute(s, inverse_qft_gates({0, s.qubits()}, approx_bound), workers);
}

// ---------------------------------------------------------------------------
// Grover

/// Register qubits for an n-bit search, counting the optional ancilla.
inline int grover_qubits(int n, bool ancilla) { return ancilla ? n + 1 : n; }

inline int grover_default_iterations(int n) {
  return static_cast<int>(std::floor(M_PI / 4.0 * std::sqrt(std::ldexp(1.0, n))));
}

template <typename Scalar>
void grover_iteration(BasicStateVector<Scalar>& s, std::uint64_t k, bool ancilla, int workers = default_workers()) {
  const int n = ancilla ? s.qubits() - 1 : s.qubits();
  detail::require(n >= 1, "grover: register too small");
  detail::require(k < (std::uint64_t{1} << n), "grover: marked element out of range");
  execute(s, grover_iteration_gates(n, k, ancilla), workers);
}

/// <k|psi> of the data register; with an ancilla the ancilla is projected on
/// (|0> - |1>)/sqrt 2.
template <typename Scalar>
std::complex<Scalar> grover_target_amplitude(const BasicStateVector<Scalar>& s, std::uint64_t k, bool ancilla) {
  if (!ancilla) return s[k];
  return (s[2 * k] - s[2 * k + 1]) / std::sqrt(Scalar(2));
}

/// Probability that the data register reads k.
template <typename Scalar>
Scalar grover_target_probability(const BasicStateVector<Scalar>& s, std::uint64_t k, bool ancilla) {
  if (!ancilla) return std::norm(s[k]);
  return std::norm(s[2 * k]) + std::norm(s[2 * k + 1]);
}

struct GroverResult {
  int iterations = 0;
  std::vector<double> trace;  // real target amplitude after each iteration
  double success_probability = 0.0;
  std::uint64_t value = 0;
};

inline GroverResult grover_search(int n, std::uint64_t k, std::optional<int> iterations, bool ancilla, Rng& rng,
                                  int workers = default_workers()) {
  GroverResult out;
  out.iterations = iterations.value_or(grover_default_iterations(n));
  StateVector s(grover_qubits(n, ancilla));
  execute(s, grover_prepare_gates(n, ancilla), workers);
  const Circuit step = grover_iteration_gates(n, k, ancilla);
  for (int j = 0; j < out.iterations; ++j) {
    execute(s, step, workers);
    out.trace.push_back(grover_target_amplitude(s, k, ancilla).real());
  }
  out.success_probability = grover_target_probability(s, k, ancilla);
  out.value = measure_subregister(s, 0, n, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Modular exponentiation

inline int bit_length(std::uint64_t v) {
  int l = 0;
  while (v) {
    ++l;
    v >>= 1;
  }
  return l;
}

/// |res>|a> -> |res XOR x^a mod N>|a>. Result register is qubits [0, l),
/// argument register qubits [l, 3l) (a ranges up to ~N^2).
struct ModExpSpec {
  std::uint64_t base = 0;
  std::uint64_t modulus = 0;
  int bits = 0;  // l

  QubitRange result() const { return {0, bits}; }
  QubitRange argument() const { return {bits, 2 * bits}; }
  int qubits() const { return 3 * bits; }
};

inline ModExpSpec make_modexp_spec(std::uint64_t x, std::uint64_t modulus) {
  detail::require(modulus >= 3, "modexp: modulus too small");
  detail::require(x >= 1 && x < modulus, "modexp: base out of range");
  detail::require(std::gcd(x, modulus) == 1, "modexp: gcd(x, N) != 1");
  return {x, modulus, bit_length(modulus)};
}

/// Qubits needed by the gate-level modular exponentiation circuit built from
/// controlled constant adders: 5l + 6.
constexpr int modexp_qubit_budget(int l) { return 5 * l + 6; }

class ModExpPermutation {
 public:
  explicit ModExpPermutation(const ModExpSpec& spec) : spec_(spec) {
    std::uint64_t sq = spec.base % spec.modulus;
    for (int i = 0; i < 2 * spec.bits; ++i) {
      squares_.push_back(sq);
      sq = sq * sq % spec.modulus;
    }
  }

  /// x^a mod N as the product of x^{2^i} over the set bits of a.
  std::uint64_t power(std::uint64_t a) const {
    std::uint64_t acc = 1 % spec_.modulus;
    for (std::size_t i = 0; i < squares_.size(); ++i)
      if ((a >> i) & 1) acc = acc * squares_[i] % spec_.modulus;
    return acc;
  }

  std::uint64_t operator()(std::uint64_t index) const {
    const int arg_bits = 2 * spec_.bits;
    const std::uint64_t a = index & ((std::uint64_t{1} << arg_bits) - 1);
    const std::uint64_t res = index >> arg_bits;
    return ((res ^ power(a)) << arg_bits) | a;
  }

  const ModExpSpec& spec() const { return spec_; }

 private:
  ModExpSpec spec_;
  std::vector<std::uint64_t> squares_;
};

inline ModExpPermutation modexp_operator(const ModExpSpec& spec) { return ModExpPermutation(spec); }

}  // namespace pqsim
