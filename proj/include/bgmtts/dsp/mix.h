// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_MIX_H_
#define BGMTTS_DSP_MIX_H_

#include <cstdint>
#include <vector>

#include "bgmtts/dsp/waveform.h"

namespace bgmtts::dsp {

struct MixResult {
  Waveform mixture;
  Waveform scaled_music;
  double gain = 0.0;
};

// Activity detection used for SNR power estimates: 32 ms frames whose mean
// square is at least -40 dBFS.
inline constexpr double kVadFrameSeconds = 0.032;
inline constexpr double kVadThresholdDb = -40.0;

// Per-sample activity flags of `wave`. Falls back to all samples when no
// frame passes the threshold.
std::vector<bool> ActiveSamples(const Waveform& wave);

// Mean power of `wave` restricted to `active`.
double ActivePower(const Waveform& wave, const std::vector<bool>& active);

// Measured SNR (dB) of speech vs. noise over the speech's active samples.
double MeasureSnrDb(const Waveform& speech, const Waveform& noise);

// Fits `music` to the speech length (random crop if longer, looped from a
// random offset if shorter; both seeded) and scales it so that the speech
// to music power ratio over the speech's active region equals snr_db.
// Throws ArgumentError for a non-finite SNR or rate mismatch and DataError
// for zero-power inputs.
MixResult MixAtSnr(const Waveform& speech, const Waveform& music,
                   double snr_db, std::uint64_t seed);

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_MIX_H_
