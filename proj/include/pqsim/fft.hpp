#pragma once

// Unitary-normalized DFT over the full amplitude array. Forward uses
// omega = e^{+2 pi i / N}, matching the QFT. Row transforms are FFTW plans;
// sizes that fit in cache run as one row, larger ones use the six-step layout
// (N = R*C: transpose, length-R row transforms, twiddle, transpose, length-C
// row transforms, transpose), in place for even n and with one scratch array
// of N amplitudes for odd n. Rows are split across workers; each row's
// arithmetic is fixed, so results do not depend on the worker count.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>
#include <vector>

#include "pqsim/kernels.hpp"
#include "pqsim/statevec.hpp"

namespace pqsim {
namespace detail {

/// tw[k] = e^{2 pi i k step / size} for k < count, cached per (size, step, count).
template <typename Scalar>
std::shared_ptr<const std::vector<std::complex<Scalar>>> twiddles(std::uint64_t size, std::uint64_t step,
                                                                  std::uint64_t count) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>,
                  std::shared_ptr<const std::vector<std::complex<Scalar>>>>
      cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{size, step, count}];
  if (!slot) {
    auto tw = std::make_shared<std::vector<std::complex<Scalar>>>(count);
    const long double two_pi = 6.283185307179586476925286766559L;
    for (std::uint64_t k = 0; k < count; ++k) {
      const std::uint64_t e = (k * step) % size;
      const long double angle = two_pi * static_cast<long double>(e) / static_cast<long double>(size);
      (*tw)[k] = {static_cast<Scalar>(std::cos(angle)), static_cast<Scalar>(std::sin(angle))};
    }
    slot = std::move(tw);
  }
  return slot;
}

/// Largest transform done in one piece (2^13 amplitudes = 128 KiB).
inline constexpr int kFftDirectBits = 13;

/// Unnormalized in-place transform of one contiguous row of 2^bits values,
/// sum_y e^{sign 2 pi i x y / 2^bits} a_y. Thread safe.
void fft_row(std::complex<double>* a, int bits, int sign);

inline constexpr std::uint64_t kTransposeTile = 16;

/// dst (cols x rows) = transpose of src (rows x cols), in tiles.
template <typename Scalar>
void transpose(const std::complex<Scalar>* src, std::complex<Scalar>* dst, std::uint64_t rows, std::uint64_t cols,
               int workers) {
  constexpr std::uint64_t tile = kTransposeTile;
  parallel_ranges(workers, (rows + tile - 1) / tile, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t rb = lo * tile; rb < std::min(rows, hi * tile); rb += tile)
      for (std::uint64_t cb = 0; cb < cols; cb += tile)
        for (std::uint64_t r = rb; r < std::min(rows, rb + tile); ++r)
          for (std::uint64_t c = cb; c < std::min(cols, cb + tile); ++c) dst[c * rows + r] = src[r * cols + c];
  });
}

/// In-place transpose of a square dim x dim matrix (dim a multiple of the tile).
template <typename Scalar>
void transpose_square(std::complex<Scalar>* a, std::uint64_t dim, int workers) {
  constexpr std::uint64_t tile = kTransposeTile;
  parallel_ranges(workers, dim / tile, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t ib = lo * tile; ib < hi * tile; ib += tile)
      for (std::uint64_t jb = ib; jb < dim; jb += tile)
        for (std::uint64_t i = ib; i < ib + tile; ++i)
          for (std::uint64_t j = (jb == ib ? i + 1 : jb); j < jb + tile; ++j) std::swap(a[i * dim + j], a[j * dim + i]);
  });
}

/// Row transforms of `rows` contiguous rows of 2^bits values; when `twiddle`
/// is set, row r's entry k is then multiplied by twiddle(r, k).
template <typename Scalar, typename Twiddle>
void fft_rows(std::complex<Scalar>* a, std::uint64_t rows, int bits, int sign, int workers, Twiddle twiddle) {
  static_assert(std::is_same_v<Scalar, double>, "the FFT path is double precision");
  const std::uint64_t len = std::uint64_t{1} << bits;
  parallel_ranges(workers, rows, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t r = lo; r < hi; ++r) {
      std::complex<Scalar>* row = a + r * len;
      fft_row(row, bits, sign);
      twiddle(r, row, len);
    }
  });
}

template <typename Scalar>
void fft_in_place(std::complex<Scalar>* a, int bits, int sign, int workers) {
  using Complex = std::complex<Scalar>;
  const std::uint64_t size = std::uint64_t{1} << bits;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(size));
  auto scale_row = [scale](std::uint64_t, Complex* row, std::uint64_t len) {
    Scalar* v = reinterpret_cast<Scalar*>(row);
    for (std::uint64_t i = 0; i < 2 * len; ++i) v[i] *= scale;
  };

  if (bits <= kFftDirectBits) {
    fft_rows(a, 1, bits, sign, 1, scale_row);
    return;
  }

  // index = n1 * C + n2 (R rows of C); output k = k1 + R * k2.
  const int rbits = bits / 2, cbits = bits - rbits;
  const std::uint64_t rows = std::uint64_t{1} << rbits, cols = std::uint64_t{1} << cbits;
  const bool square = rbits == cbits;
  std::vector<Complex> scratch;
  Complex* work = a;
  if (square) {
    transpose_square(a, rows, workers);  // a[n2][n1]
  } else {
    scratch.resize(size);
    work = scratch.data();
    transpose(a, work, rows, cols, workers);  // work[n2][n1]
  }

  // After the length-R transform of row n2, entry k1 picks up
  // scale * omega_N^{sign n2 k1} = scale * lo[e mod 2^h] * hi[e >> h], e = n2 k1.
  const int h = (bits + 1) / 2;
  const std::uint64_t mask = (std::uint64_t{1} << h) - 1;
  const auto lo = twiddles<Scalar>(size, sign > 0 ? 1 : size - 1, mask + 1);
  const auto hi = twiddles<Scalar>(size, sign > 0 ? mask + 1 : size - (mask + 1), size >> h);
  fft_rows(work, cols, rbits, sign, workers, [&](std::uint64_t n2, Complex* row, std::uint64_t len) {
    Scalar* v = reinterpret_cast<Scalar*>(row);
    for (std::uint64_t k1 = 0; k1 < len; ++k1) {
      const std::uint64_t e = n2 * k1;
      const Complex l = (*lo)[e & mask], u = (*hi)[e >> h];
      const Scalar wr = scale * (l.real() * u.real() - l.imag() * u.imag());
      const Scalar wi = scale * (l.real() * u.imag() + l.imag() * u.real());
      const Scalar xr = v[2 * k1], xi = v[2 * k1 + 1];
      v[2 * k1] = wr * xr - wi * xi;
      v[2 * k1 + 1] = wr * xi + wi * xr;
    }
  });

  if (square)
    transpose_square(a, rows, workers);  // a[k1][n2]
  else
    transpose(work, a, cols, rows, workers);
  fft_rows(a, rows, cbits, sign, workers, [](std::uint64_t, Complex*, std::uint64_t) {});  // a[k1][k2]
  if (square) {
    transpose_square(a, rows, workers);  // a[k2][k1]
  } else {
    transpose(a, work, rows, cols, workers);
    std::copy(scratch.begin(), scratch.end(), a);
  }
}

}  // namespace detail

/// beta_x = 2^{-n/2} sum_y e^{2 pi i x y / 2^n} alpha_y over the whole register.
template <typename Scalar>
void qft_fft(BasicStateVector<Scalar>& s, int workers = default_workers()) {
  detail::fft_in_place(s.data(), s.qubits(), +1, workers);
}

template <typename Scalar>
void inverse_qft_fft(BasicStateVector<Scalar>& s, int workers = default_workers()) {
  detail::fft_in_place(s.data(), s.qubits(), -1, workers);
}

}  // namespace pqsim
