// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_METRICS_H_
#define BGMTTS_DSP_METRICS_H_

#include "bgmtts/dsp/stft.h"

namespace bgmtts::dsp {

inline constexpr double kSiSnrCapDb = 60.0;
inline constexpr double kLsdFloorDb = -80.0;

// Scale-invariant SNR in dB, capped at 60 dB. Throws ArgumentError on a
// length mismatch or an all-zero reference.
double SiSnr(const Waveform& reference, const Waveform& estimate);

// Mean over frames of the RMS difference of dB magnitudes, each floored at
// -80 dB.
double LogSpectralDistance(const MagnitudeSpectrogram& a,
                           const MagnitudeSpectrogram& b);

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_METRICS_H_
