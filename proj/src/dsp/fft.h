// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_SRC_DSP_FFT_H_
#define BGMTTS_SRC_DSP_FFT_H_

#include <complex>
#include <vector>

namespace bgmtts::dsp::internal {

// Real FFT of a fixed size backed by FFTW. Plans are created once per size
// under a lock; execution is re-entrant.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }

  // in: size() reals, out: size()/2 + 1 bins.
  void Forward(const double* in, std::complex<double>* out) const;
  // Unnormalised inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(const std::complex<double>* in, double* out) const;

 private:
  int size_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace bgmtts::dsp::internal

#endif  // BGMTTS_SRC_DSP_FFT_H_
