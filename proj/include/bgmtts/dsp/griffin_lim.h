// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_GRIFFIN_LIM_H_
#define BGMTTS_DSP_GRIFFIN_LIM_H_

#include <cstdint>
#include <vector>

#include "bgmtts/dsp/stft.h"

namespace bgmtts::dsp {

struct GriffinLimResult {
  Waveform wave;
  // residuals[k] = || |STFT(x_k)| - M || / ||M|| after iteration k.
  std::vector<double> residuals;
};

// Phase reconstruction by alternating projections. The starting phase
// follows the spectral peaks of `magnitude` from seeded random offsets. The returned signal has (frames - 1) * hop samples.
GriffinLimResult GriffinLim(const MagnitudeSpectrogram& magnitude, int iters,
                            std::uint64_t seed);

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_GRIFFIN_LIM_H_
