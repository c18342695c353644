// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace bgmtts::dsp::internal {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

std::mutex& PlanMutex() {
  static std::mutex mutex;
  return mutex;
}

// Plans live for the process lifetime.
PlanPair GetPlans(int size) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(PlanMutex());
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  std::vector<double> real(size);
  std::vector<fftw_complex> spec(size / 2 + 1);
  PlanPair plans;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans.forward =
      fftw_plan_dft_r2c_1d(size, real.data(), spec.data(), flags);
  plans.inverse = fftw_plan_dft_c2r_1d(size, spec.data(), real.data(),
                                       flags | FFTW_DESTROY_INPUT);
  cache.emplace(size, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  PlanPair plans = GetPlans(size);
  forward_plan_ = plans.forward;
  inverse_plan_ = plans.inverse;
}

void RealFft::Forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_),
                       const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::Inverse(const std::complex<double>* in, double* out) const {
  // c2r overwrites its input.
  std::vector<std::complex<double>> scratch(in, in + size_ / 2 + 1);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

}  // namespace bgmtts::dsp::internal
