#include "pqsim/fft.hpp"

#include <fftw3.h>

namespace pqsim::detail {

namespace {

// ESTIMATE plans are chosen without timing runs, so the same plan (and the
// same rounding) comes back on every run.
fftw_plan row_plan(int bits, int sign) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mu);
  fftw_plan& plan = plans[{bits, sign}];
  if (plan == nullptr) {
    const int len = 1 << bits;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(len));
    plan = fftw_plan_dft_1d(len, buf, buf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (plan == nullptr) throw ContractViolation("FFTW could not plan a length-" + std::to_string(len) + " transform");
  }
  return plan;
}

}  // namespace

void fft_row(std::complex<double>* a, int bits, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(a);
  fftw_execute_dft(row_plan(bits, sign), p, p);
}

}  // namespace pqsim::detail
