#pragma once

// In-place gate application. A gate on target qubit t touches amplitude pairs
// (j, j + 2^(n-1-t)) where bit t of j is 0. The pairs are numbered 0..2^(n-1)-1
// ("pair index"); a WorkPlan hands every pair, both members together, to
// exactly one worker. Each worker updates its pairs through a local temporary,
// so no pair is ever read after a partial write and one barrier per gate
// application is enough.

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pqsim/errors.hpp"
#include "pqsim/statevec.hpp"

namespace pqsim {

// ---------------------------------------------------------------------------
// Worker configuration and instrumentation

namespace detail {
inline std::atomic<int>& default_workers_slot() {
  static std::atomic<int> slot{0};
  return slot;
}
}  // namespace detail

/// Worker count used when none is given: set_default_workers(), else the
/// PQSIM_WORKERS environment variable, else hardware concurrency.
inline int default_workers() {
  if (int w = detail::default_workers_slot().load(); w > 0) return w;
  if (const char* env = std::getenv("PQSIM_WORKERS")) {
    if (int w = std::atoi(env); w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_default_workers(int workers) { detail::default_workers_slot().store(workers); }

struct KernelCounters {
  std::atomic<std::uint64_t> pair_updates{0};
  std::atomic<std::uint64_t> barriers{0};

  void reset() {
    pair_updates = 0;
    barriers = 0;
  }
};

inline KernelCounters& kernel_counters() {
  static KernelCounters counters;
  return counters;
}

/// Runs fn(worker) for every worker id, then counts one barrier.
template <typename Fn>
void run_workers(int workers, Fn&& fn) {
  if (workers <= 1) {
    fn(0);
  } else {
#pragma omp parallel for num_threads(workers) schedule(static, 1)
    for (int w = 0; w < workers; ++w) fn(w);
  }
  kernel_counters().barriers.fetch_add(1, std::memory_order_relaxed);
}

/// Splits [0, total) into `workers` contiguous balanced ranges and runs fn(begin, end).
template <typename Fn>
void parallel_ranges(int workers, std::uint64_t total, Fn&& fn) {
  const auto w_count = static_cast<std::uint64_t>(std::max(workers, 1));
  run_workers(static_cast<int>(w_count), [&](int w) {
    const std::uint64_t lo = total * static_cast<std::uint64_t>(w) / w_count;
    const std::uint64_t hi = total * static_cast<std::uint64_t>(w + 1) / w_count;
    if (lo < hi) fn(lo, hi);
  });
}

// ---------------------------------------------------------------------------
// GateMatrix

enum class UnitaryCheck { Strict, Off };

/// A 2x2 gate U = [[u11, u12], [u21, u22]]. Only U is stored; the register-wide
/// operator is never built.
template <typename Scalar>
class BasicGateMatrix {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, 2, 2>;

  explicit BasicGateMatrix(const Matrix& m, UnitaryCheck check = UnitaryCheck::Strict) : m_(m) {
    if (check == UnitaryCheck::Strict && !is_unitary(m_))
      throw ContractViolation("gate matrix is not unitary within 1e-12");
  }

  BasicGateMatrix(Complex u11, Complex u12, Complex u21, Complex u22,
                  UnitaryCheck check = UnitaryCheck::Strict)
      : BasicGateMatrix(make(u11, u12, u21, u22), check) {}

  const Matrix& matrix() const { return m_; }
  Complex u11() const { return m_(0, 0); }
  Complex u12() const { return m_(0, 1); }
  Complex u21() const { return m_(1, 0); }
  Complex u22() const { return m_(1, 1); }

  bool is_diagonal() const { return m_(0, 1) == Complex(0) && m_(1, 0) == Complex(0); }

  BasicGateMatrix adjoint() const { return BasicGateMatrix(Matrix(m_.adjoint()), UnitaryCheck::Off); }

  static bool is_unitary(const Matrix& m, Scalar tol = Scalar(1e-12)) {
    return ((m * m.adjoint()) - Matrix::Identity()).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  static Matrix make(Complex a, Complex b, Complex c, Complex d) {
    Matrix m;
    m << a, b, c, d;
    return m;
  }

  Matrix m_;
};

using GateMatrix = BasicGateMatrix<double>;

namespace gates {

template <typename Scalar = double>
BasicGateMatrix<Scalar> hadamard() {
  const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
  return {h, h, h, -h};
}

template <typename Scalar = double>
BasicGateMatrix<Scalar> pauli_x() {
  return {0, 1, 1, 0};
}

template <typename Scalar = double>
BasicGateMatrix<Scalar> pauli_y() {
  using C = std::complex<Scalar>;
  return {C(0), C(0, -1), C(0, 1), C(0)};
}

template <typename Scalar = double>
BasicGateMatrix<Scalar> pauli_z() {
  return {1, 0, 0, -1};
}

template <typename Scalar = double>
BasicGateMatrix<Scalar> identity() {
  return {1, 0, 0, 1};
}

/// diag(1, e^{i*sign*pi/2^d}).
template <typename Scalar = double>
BasicGateMatrix<Scalar> phase_rd(int d, int sign = 1) {
  const Scalar angle = Scalar(sign) * Scalar(M_PI) / std::ldexp(Scalar(1), d);
  return {1, 0, 0, std::polar(Scalar(1), angle)};
}

}  // namespace gates

// ---------------------------------------------------------------------------
// WorkPlan

/// Half-open range of pair indices.
struct PairRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

/// Partition of the 2^(n-1) amplitude pairs of one gate application.
///
/// With B = 2^t independent blocks (each block is one S_k phi_k product) and W
/// workers: if B >= W, worker w gets a contiguous run of whole blocks; otherwise
/// every block is cut into W row chunks and worker w gets chunk w of each
/// block. Chunks are cut in pair space, so the rows j and j + 2^(n-1-t) always
/// land on the same worker.
class WorkPlan {
 public:
  WorkPlan(int qubits, int target, int workers) : n_(qubits), target_(target), workers_(workers) {
    detail::require(qubits >= 1 && qubits <= 62, "plan: qubit count out of range");
    detail::require(target >= 0 && target < qubits, "plan: target qubit >= qubit count");
    detail::require(workers >= 1, "plan: need at least one worker");
    low_bits_ = n_ - 1 - target_;
    const std::uint64_t blocks = block_count();
    const std::uint64_t rows = stride();
    const auto w_count = static_cast<std::uint64_t>(workers_);
    ranges_.resize(static_cast<std::size_t>(workers_));
    if (blocks >= w_count) {
      for (std::uint64_t w = 0; w < w_count; ++w) {
        const std::uint64_t lo = blocks * w / w_count;
        const std::uint64_t hi = blocks * (w + 1) / w_count;
        if (lo < hi) ranges_[w].push_back({lo * rows, hi * rows});
      }
    } else {
      split_ = true;
      for (std::uint64_t w = 0; w < w_count; ++w) {
        const std::uint64_t lo = rows * w / w_count;
        const std::uint64_t hi = rows * (w + 1) / w_count;
        if (lo == hi) continue;
        for (std::uint64_t k = 0; k < blocks; ++k) ranges_[w].push_back({k * rows + lo, k * rows + hi});
      }
    }
  }

  int qubits() const { return n_; }
  int target() const { return target_; }
  int workers() const { return workers_; }

  /// Distance between the two members of a pair, 2^(n-1-t).
  std::uint64_t stride() const { return std::uint64_t{1} << low_bits_; }
  /// Number of independent diagonal blocks, 2^t.
  std::uint64_t block_count() const { return std::uint64_t{1} << target_; }
  std::uint64_t pair_count() const { return std::uint64_t{1} << (n_ - 1); }
  /// True when blocks were cut into row chunks (fewer blocks than workers).
  bool splits_blocks() const { return split_; }

  std::span<const PairRange> assignment(int worker) const { return ranges_.at(static_cast<std::size_t>(worker)); }

  /// Basis index of the bit-0 member of a pair.
  std::uint64_t first_index(std::uint64_t pair) const {
    const std::uint64_t mask = stride() - 1;
    return ((pair & ~mask) << 1) | (pair & mask);
  }

 private:
  int n_;
  int target_;
  int workers_;
  int low_bits_ = 0;
  bool split_ = false;
  std::vector<std::vector<PairRange>> ranges_;
};

inline WorkPlan plan(int qubits, int target, int workers) { return WorkPlan(qubits, target, workers); }

// ---------------------------------------------------------------------------
// Kernels

namespace detail {

template <typename Scalar>
void check_plan(const BasicStateVector<Scalar>& s, int target, const WorkPlan& p) {
  require(p.qubits() == s.qubits() && p.target() == target, "work plan does not match register/target");
}

/// Applies U to every pair accepted by keep(first_index).
template <typename Scalar, typename Keep>
void apply_pairs(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, const WorkPlan& p, Keep&& keep) {
  using Complex = std::complex<Scalar>;
  Complex* amps = s.data();
  const std::uint64_t stride = p.stride();
  const Complex u11 = u.u11(), u12 = u.u12(), u21 = u.u21(), u22 = u.u22();
  const bool diagonal = u.is_diagonal();
  std::atomic<std::uint64_t>& counter = kernel_counters().pair_updates;

  run_workers(p.workers(), [&](int w) {
    std::uint64_t updates = 0;
    for (const PairRange& r : p.assignment(w)) {
      for (std::uint64_t q = r.begin; q < r.end; ++q) {
        const std::uint64_t a = p.first_index(q);
        if (!keep(a)) continue;
        const std::uint64_t b = a + stride;
        if (diagonal) {
          amps[a] = u11 * amps[a];
          amps[b] = u22 * amps[b];
        } else {
          const Complex x = amps[a];
          const Complex y = amps[b];
          const Complex t1 = u11 * x + u12 * y;
          amps[b] = u21 * x + u22 * y;
          amps[a] = t1;
        }
        ++updates;
      }
    }
    counter.fetch_add(updates, std::memory_order_relaxed);
  });
}

}  // namespace detail

/// U on `target`, in place, parallel per `p`.
template <typename Scalar>
void apply_single(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, int target, const WorkPlan& p) {
  detail::check_plan(s, target, p);
  detail::apply_pairs(s, u, p, [](std::uint64_t) { return true; });
}

template <typename Scalar>
void apply_single(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, int target,
                  int workers = default_workers()) {
  apply_single(s, u, target, plan(s.qubits(), target, workers));
}

struct Control {
  int qubit;
  bool value = true;
};

/// U on `target` restricted to basis states where every control qubit holds its
/// required bit.
template <typename Scalar>
void apply_controlled(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, std::span<const Control> controls,
                      int target, const WorkPlan& p) {
  detail::check_plan(s, target, p);
  const int n = s.qubits();
  std::uint64_t mask = 0, want = 0;
  for (const Control& c : controls) {
    detail::require(c.qubit >= 0 && c.qubit < n, "control qubit out of range");
    detail::require(c.qubit != target, "control overlaps target");
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - c.qubit);
    detail::require((mask & bit) == 0, "duplicate control qubit");
    mask |= bit;
    if (c.value) want |= bit;
  }
  detail::apply_pairs(s, u, p, [mask, want](std::uint64_t j) { return (j & mask) == want; });
}

template <typename Scalar>
void apply_controlled(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, std::span<const Control> controls,
                      int target, int workers = default_workers()) {
  apply_controlled(s, u, controls, target, plan(s.qubits(), target, workers));
}

/// Contiguous qubit range [first, first+count), first qubit most significant.
struct QubitRange {
  int first = 0;
  int count = 0;

  bool contains(int q) const { return q >= first && q < first + count; }
};

/// U on `target` iff f(value of the control range) is true.
template <typename Scalar, typename Predicate>
void apply_f_controlled(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, Predicate&& f,
                        QubitRange controls, int target, const WorkPlan& p) {
  detail::check_plan(s, target, p);
  const int n = s.qubits();
  detail::require(controls.count >= 1 && controls.first >= 0 && controls.first + controls.count <= n,
                  "control range out of bounds");
  detail::require(!controls.contains(target), "target inside control range");
  const int shift = n - controls.first - controls.count;
  const std::uint64_t mask = (std::uint64_t{1} << controls.count) - 1;
  detail::apply_pairs(s, u, p, [&](std::uint64_t j) { return static_cast<bool>(f((j >> shift) & mask)); });
}

template <typename Scalar, typename Predicate>
void apply_f_controlled(BasicStateVector<Scalar>& s, const BasicGateMatrix<Scalar>& u, Predicate&& f,
                        QubitRange controls, int target, int workers = default_workers()) {
  apply_f_controlled(s, u, std::forward<Predicate>(f), controls, target, plan(s.qubits(), target, workers));
}

/// alpha_j <- -alpha_j wherever pred(j).
template <typename Scalar, typename Predicate>
void apply_phase_flip(BasicStateVector<Scalar>& s, Predicate&& pred, int workers = default_workers()) {
  auto* amps = s.data();
  parallel_ranges(workers, s.size(), [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t j = lo; j < hi; ++j)
      if (pred(j)) amps[j] = -amps[j];
  });
}

/// Multiplies every amplitude by a constant phase.
template <typename Scalar>
void apply_global_phase(BasicStateVector<Scalar>& s, std::complex<Scalar> phase, int workers = default_workers()) {
  auto* amps = s.data();
  parallel_ranges(workers, s.size(), [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t j = lo; j < hi; ++j) amps[j] *= phase;
  });
}

inline constexpr int kBijectionCheckMaxQubits = 20;

/// Throws unless perm is a bijection on [0, size). Coverage bitmap.
template <typename Permutation>
void validate_bijection(std::uint64_t size, const Permutation& perm) {
  std::vector<bool> seen(size, false);
  for (std::uint64_t j = 0; j < size; ++j) {
    const std::uint64_t to = perm(j);
    if (to >= size || seen[to]) throw ContractViolation("permutation is not a bijection on basis indices");
    seen[to] = true;
  }
}

/// new amps[perm(j)] = old amps[j]. Out of place through a scratch array;
/// validated for registers of up to 20 qubits.
template <typename Scalar, typename Permutation>
void apply_permutation(BasicStateVector<Scalar>& s, const Permutation& perm, int workers = default_workers()) {
  if (s.qubits() <= kBijectionCheckMaxQubits) validate_bijection(s.size(), perm);
  using Vector = typename BasicStateVector<Scalar>::Vector;
  Vector scratch(s.amplitudes().size());
  const auto* src = s.data();
  auto* dst = scratch.data();
  parallel_ranges(workers, s.size(), [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t j = lo; j < hi; ++j) dst[perm(j)] = src[j];
  });
  s.amplitudes().swap(scratch);
}

/// Exchanges two qubits (three CNOTs).
template <typename Scalar>
void apply_swap(BasicStateVector<Scalar>& s, int a, int b, int workers = default_workers()) {
  detail::require(a != b, "swap of a qubit with itself");
  const auto x = gates::pauli_x<Scalar>();
  const Control ca[] = {{a, true}};
  const Control cb[] = {{b, true}};
  apply_controlled(s, x, std::span<const Control>(ca), b, workers);
  apply_controlled(s, x, std::span<const Control>(cb), a, workers);
  apply_controlled(s, x, std::span<const Control>(ca), b, workers);
}

}  // namespace pqsim
