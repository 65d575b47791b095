#pragma once

// Shared helpers for the unit tests: deterministic states, explicit-matrix
// oracles, and a chi-square check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pqsim/kernels.hpp"
#include "pqsim/random.hpp"
#include "pqsim/statevec.hpp"

namespace test {

using pqsim::StateVector;
using Complex = std::complex<double>;
using Dense = Eigen::MatrixXcd;

inline StateVector uniform_state(int n) {
  StateVector s(n);
  s.amplitudes().setConstant(Complex(1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << n))));
  return s;
}

inline StateVector random_normalized(int n, std::uint64_t seed) {
  pqsim::Rng rng(seed);
  StateVector s(n);
  for (std::uint64_t i = 0; i < s.size(); ++i) s[i] = {rng.normal(1.0), rng.normal(1.0)};
  s.normalize();
  return s;
}

/// Random 2x2 unitary: e^{i a} [[e^{i b} cos t, -e^{-i c} sin t], [e^{i c} sin t, e^{-i b} cos t]].
inline pqsim::GateMatrix random_unitary(pqsim::Rng& rng) {
  const double a = 2 * M_PI * rng.uniform(), b = 2 * M_PI * rng.uniform(), c = 2 * M_PI * rng.uniform();
  const double t = M_PI * rng.uniform();
  const Complex g = std::polar(1.0, a);
  return {g * std::polar(std::cos(t), b), -g * std::polar(std::sin(t), -c), g * std::polar(std::sin(t), c),
          g * std::polar(std::cos(t), -b)};
}

/// Full 2^n x 2^n operator, row by row: row j of the controlled operator is the
/// identity row unless every control bit of j holds its value; then row j is
/// u11/u12 (bit t of j clear) or u21/u22 (bit t set) at columns j and its
/// partner j XOR 2^(n-1-t).
inline Dense explicit_operator(int n, const pqsim::GateMatrix& u, int target,
                               const std::vector<pqsim::Control>& controls = {}) {
  const std::uint64_t size = std::uint64_t{1} << n;
  const std::uint64_t tbit = std::uint64_t{1} << (n - 1 - target);
  Dense x = Dense::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::uint64_t j = 0; j < size; ++j) {
    bool active = true;
    for (const pqsim::Control& c : controls) {
      const bool bit = (j >> (n - 1 - c.qubit)) & 1;
      if (bit != c.value) active = false;
    }
    const auto r = static_cast<Eigen::Index>(j);
    if (!active) {
      x(r, r) = 1;
      continue;
    }
    const auto partner = static_cast<Eigen::Index>(j ^ tbit);
    if ((j & tbit) == 0) {
      x(r, r) = u.u11();
      x(r, partner) = u.u12();
    } else {
      x(r, partner) = u.u21();
      x(r, r) = u.u22();
    }
  }
  return x;
}

/// Direct O(4^n) DFT with omega = e^{+2 pi i / N}, unitary scaling.
inline StateVector direct_dft(const StateVector& s) {
  const std::uint64_t size = s.size();
  StateVector out(s.qubits());
  for (std::uint64_t x = 0; x < size; ++x) {
    Complex acc = 0;
    for (std::uint64_t y = 0; y < size; ++y) {
      const std::uint64_t e = (x * y) % size;
      acc += std::polar(1.0, 2 * M_PI * static_cast<double>(e) / static_cast<double>(size)) * s[y];
    }
    out[x] = acc / std::sqrt(static_cast<double>(size));
  }
  return out;
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
}

inline bool bit_identical(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) return false;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
  return true;
}

/// Upper 99% chi-square quantile (Wilson-Hilferty).
inline double chi_square_99(double dof) {
  const double z = 2.3263478740408408;
  const double h = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - h + z * std::sqrt(h), 3);
}

/// Pearson test of observed counts against probabilities; cells with tiny
/// expectation are pooled.
inline bool chi_square_ok(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs,
                          std::uint64_t draws) {
  double stat = 0, pooled_obs = 0, pooled_exp = 0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = probs[i] * static_cast<double>(draws);
    if (e < 5) {
      pooled_obs += static_cast<double>(counts[i]);
      pooled_exp += e;
      continue;
    }
    const double d = static_cast<double>(counts[i]) - e;
    stat += d * d / e;
    ++cells;
  }
  if (pooled_exp >= 5) {
    const double d = pooled_obs - pooled_exp;
    stat += d * d / pooled_exp;
    ++cells;
  }
  if (cells < 2) return true;
  return stat <= chi_square_99(cells - 1);
}

}  // namespace test
