#pragma once

// Dense register representation. Qubit 0 is the most significant bit of the
// basis index: qubit q addresses bit n-1-q, i.e. stride 2^(n-1-q).

#include <Eigen/Core>

#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "pqsim/errors.hpp"
#include "pqsim/random.hpp"

namespace pqsim {

inline constexpr int kMaxQubits = 30;

/// Bytes needed for an n-qubit register: 16 bytes per amplitude, 2^(n+4) total.
constexpr std::uint64_t memory_bytes(int n) {
  if (n < 1 || n > 59) throw SizeError("memory_bytes: qubit count out of range");
  return std::uint64_t{1} << (n + 4);
}

/// Default ceiling on a single register allocation (4 GiB).
inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{1} << 32;

/// Throws BudgetError when an n-qubit register would not fit in `budget` bytes.
inline void check_budget(int n, std::uint64_t budget) {
  const std::uint64_t need = memory_bytes(n);
  if (need > budget)
    throw BudgetError("a " + std::to_string(n) + "-qubit register needs " + std::to_string(need) +
                      " bytes, above the memory budget of " + std::to_string(budget) + " bytes");
}

template <typename Scalar>
class BasicStateVector {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// |0...0> on n qubits.
  explicit BasicStateVector(int n) : n_(checked(n)), amps_(Vector::Zero(Eigen::Index{1} << n)) {
    amps_[0] = Complex(1);
  }

  /// Adopts an amplitude array whose length is a power of two. No normalization.
  static BasicStateVector from_amplitudes(Vector amps) {
    const auto len = static_cast<std::uint64_t>(amps.size());
    if (len < 2 || (len & (len - 1)) != 0)
      throw SizeError("amplitude count must be a power of two >= 2");
    int n = 0;
    while ((std::uint64_t{1} << n) < len) ++n;
    BasicStateVector s(checked(n), NoInit{});
    s.amps_ = std::move(amps);
    return s;
  }

  /// Computational basis state |index>.
  static BasicStateVector basis(int n, std::uint64_t index) {
    BasicStateVector s(n);
    detail::require(index < s.size(), "basis index out of range");
    s.amps_[0] = Complex(0);
    s.amps_[static_cast<Eigen::Index>(index)] = Complex(1);
    return s;
  }

  int qubits() const { return n_; }
  std::uint64_t size() const { return static_cast<std::uint64_t>(amps_.size()); }
  std::uint64_t stride(int qubit) const { return std::uint64_t{1} << (n_ - 1 - qubit); }

  Vector& amplitudes() { return amps_; }
  const Vector& amplitudes() const { return amps_; }
  Complex* data() { return amps_.data(); }
  const Complex* data() const { return amps_.data(); }

  Complex& operator[](std::uint64_t i) { return amps_[static_cast<Eigen::Index>(i)]; }
  const Complex& operator[](std::uint64_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  Scalar norm_squared() const { return amps_.squaredNorm(); }
  void normalize() { amps_ /= std::sqrt(norm_squared()); }

 private:
  struct NoInit {};
  BasicStateVector(int n, NoInit) : n_(n) {}

  static int checked(int n) {
    if (n < 1 || n > kMaxQubits) {
      std::string need = "2^" + std::to_string(n + 4);
      if (n >= 1 && n <= 59) need += " = " + std::to_string(memory_bytes(n));
      throw SizeError("a " + std::to_string(n) + "-qubit register needs " + need +
                      " bytes; supported range is 1.." + std::to_string(kMaxQubits) + " qubits");
    }
    return n;
  }

  int n_;
  Vector amps_;
};

using StateVector = BasicStateVector<double>;

inline StateVector new_register(int n) { return StateVector(n); }

/// |amps[0]|^2, the single-trajectory estimate of the |0><0| density entry.
template <typename Scalar>
Scalar prob_zero(const BasicStateVector<Scalar>& s) {
  return std::norm(s[0]);
}

/// |<a|b>|. Not squared.
template <typename Scalar>
Scalar fidelity(const BasicStateVector<Scalar>& a, const BasicStateVector<Scalar>& b) {
  detail::require(a.qubits() == b.qubits(), "fidelity: dimension mismatch");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

/// Index i with sum_{j<i} |a_j|^2 <= r < sum_{j<=i} |a_j|^2, one sequential
/// pass. If rounding leaves r above the accumulated total, the largest index
/// with nonzero amplitude is returned.
template <typename Scalar>
std::uint64_t sample_index(const BasicStateVector<Scalar>& s, double r) {
  double acc = 0.0;
  std::uint64_t last_nonzero = 0;
  for (std::uint64_t i = 0; i < s.size(); ++i) {
    const double p = std::norm(s[i]);
    if (p == 0.0) continue;
    acc += p;
    last_nonzero = i;
    if (r < acc) return i;
  }
  return last_nonzero;
}

/// Measures every qubit and collapses s onto the outcome.
template <typename Scalar>
std::uint64_t measure_full(BasicStateVector<Scalar>& s, Rng& rng) {
  const std::uint64_t i = sample_index(s, rng.uniform());
  s.amplitudes().setZero();
  s[i] = typename BasicStateVector<Scalar>::Complex(1);
  return i;
}

/// Value of qubits [first, first+count) in basis index `index` of an n-qubit
/// register, read with `first` as the most significant bit.
inline std::uint64_t subregister_value(std::uint64_t index, int n, int first, int count) {
  return (index >> (n - first - count)) & ((std::uint64_t{1} << count) - 1);
}

/// Marginal distribution of the contiguous qubit range [first, first+count).
template <typename Scalar>
std::vector<double> marginal(const BasicStateVector<Scalar>& s, int first, int count) {
  detail::require(count >= 1, "empty qubit range");
  detail::require(first >= 0 && first + count <= s.qubits(), "qubit range out of bounds");
  std::vector<double> probs(std::size_t{1} << count, 0.0);
  for (std::uint64_t i = 0; i < s.size(); ++i)
    probs[subregister_value(i, s.qubits(), first, count)] += std::norm(s[i]);
  return probs;
}

/// Measures qubits [first, first+count): samples from their marginal, zeroes
/// inconsistent amplitudes, renormalizes.
template <typename Scalar>
std::uint64_t measure_subregister(BasicStateVector<Scalar>& s, int first, int count, Rng& rng) {
  const std::vector<double> probs = marginal(s, first, count);
  const double r = rng.uniform();
  double acc = 0.0;
  std::uint64_t value = 0;
  for (std::uint64_t v = 0; v < probs.size(); ++v) {
    if (probs[v] == 0.0) continue;
    acc += probs[v];
    value = v;
    if (r < acc) break;
  }
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(probs[value]));
  for (std::uint64_t i = 0; i < s.size(); ++i) {
    if (subregister_value(i, s.qubits(), first, count) == value)
      s[i] *= scale;
    else
      s[i] = 0;
  }
  return value;
}

// Dump formats: little-endian u64 qubit count followed by (re, im) doubles;
// or one "index real imag" line per amplitude.

inline void write_binary(const StateVector& s, std::ostream& out) {
  static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
  const std::uint64_t n = static_cast<std::uint64_t>(s.qubits());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(s.data()),
            static_cast<std::streamsize>(s.size() * sizeof(StateVector::Complex)));
}

inline StateVector read_binary(std::istream& in) {
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || n < 1 || n > kMaxQubits) throw SizeError("state dump: bad qubit count");
  StateVector s(static_cast<int>(n));
  in.read(reinterpret_cast<char*>(s.data()),
          static_cast<std::streamsize>(s.size() * sizeof(StateVector::Complex)));
  if (!in) throw SizeError("state dump: truncated amplitude array");
  return s;
}

inline void write_text(const StateVector& s, std::ostream& out) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::uint64_t i = 0; i < s.size(); ++i) out << i << ' ' << s[i].real() << ' ' << s[i].imag() << '\n';
  out.precision(old);
}

}  // namespace pqsim
