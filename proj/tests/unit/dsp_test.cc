// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/griffin_lim.h"
#include "bgmtts/dsp/mel.h"
#include "bgmtts/dsp/metrics.h"
#include "bgmtts/dsp/mix.h"
#include "bgmtts/dsp/stft.h"
#include "doctest.h"
#include "test_util.h"

using namespace bgmtts;
using namespace bgmtts::dsp;
using bgmtts::testing::RelativeL2;
using bgmtts::testing::Sine;
using bgmtts::testing::WhiteNoise;

using bgmtts::testing::OracleSnrDb;
using bgmtts::testing::SpeechLike;

TEST_CASE("stft frame count and silence") {
  Waveform silence;
  silence.samples.assign(16000, 0.0);
  const StftParams params;  // 1024 / 1024 / 256, Hann
  const ComplexSpectrogram spec = Stft(silence, params);
  CHECK(spec.num_frames() == 1 + 16000 / 256);
  CHECK(spec.num_bins() == 513);
  CHECK(spec.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("64 ms / 16 ms at 16 kHz is 1024 / 256 samples") {
  const StftParams p = StftParams::FromMilliseconds(64.0, 16.0, 16000);
  CHECK(p.win_size == 1024);
  CHECK(p.hop_size == 256);
  CHECK(p.fft_size == 1024);
}

TEST_CASE("stft is linear") {
  const Waveform w = WhiteNoise(8000, 3);
  Waveform scaled = w;
  for (double& s : scaled.samples) s *= -2.5;
  const StftParams params;
  const ComplexMatrix a = Stft(w, params).values;
  const ComplexMatrix b = Stft(scaled, params).values;
  const double rel = (b - (-2.5) * a).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
  CHECK(rel < 1e-6);
}

TEST_CASE("stft rejects short signals and non-COLA parameters") {
  CHECK_THROWS_AS(Stft(WhiteNoise(1000, 1), StftParams{}), DataError);
  StftParams bad;
  bad.hop_size = 700;  // Hann at hop 700 of 1024 does not overlap-add flat
  CHECK_THROWS_AS(bad.Validate(), ArgumentError);
  StftParams inverted;
  inverted.win_size = 2048;
  CHECK_THROWS_AS(inverted.Validate(), ArgumentError);
  StftParams rect{512, 512, 512, WindowType::kRectangular};
  CHECK_NOTHROW(rect.Validate());
}

TEST_CASE("istft round trip") {
  const StftParams params;
  SUBCASE("440 Hz tone") {
    const Waveform w = Sine(440.0, 1.0);
    const Waveform back = Istft(Stft(w, params));
    REQUIRE(back.size() == w.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      max_err = std::max(max_err, std::abs(w.samples[i] - back.samples[i]));
    CHECK(max_err < 1e-6);
  }
  SUBCASE("white noise, 50 random signals and lengths") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> len(1024, 20000);
    for (int trial = 0; trial < 50; ++trial) {
      const Waveform w = WhiteNoise(len(rng), 100 + trial);
      const Waveform back = Istft(Stft(w, params));
      CHECK(RelativeL2(w.samples, back.samples) < 1e-6);
    }
  }
  SUBCASE("zero spectrogram gives zero waveform") {
    ComplexSpectrogram zero;
    zero.params = params;
    zero.signal_length = 4096;
    zero.values = ComplexMatrix::Zero(17, 513);
    const Waveform back = Istft(zero);
    CHECK(back.size() == 4096);
    CHECK(*std::max_element(back.samples.begin(), back.samples.end()) == 0.0);
  }
}

TEST_CASE("magnitude and phase") {
  ComplexSpectrogram s;
  s.values.resize(1, 3);
  s.values << std::complex<double>(1, 0), std::complex<double>(0, 0),
      std::complex<double>(3, 4);
  const MagnitudeSpectrogram m = Magnitude(s);
  CHECK(m.values(0, 0) == 1.0);
  CHECK(m.values(0, 1) == 0.0);
  CHECK(m.values(0, 2) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(Phase(s)(0, 2) == doctest::Approx(std::atan2(4.0, 3.0)));
}

TEST_CASE("mel filterbank shape, support and linearity") {
  const RealMatrix bank = MelFilterbank(80, 1024, 16000, 0.0, 8000.0);
  CHECK(bank.rows() == 80);
  CHECK(bank.cols() == 513);
  for (Eigen::Index m = 0; m < bank.rows(); ++m) {
    CHECK(bank.row(m).sum() > 0.0);
    // Non-zero weights form one contiguous run.
    Eigen::Index first = -1, last = -1;
    for (Eigen::Index k = 0; k < bank.cols(); ++k) {
      if (bank(m, k) > 0.0) {
        if (first < 0) first = k;
        last = k;
      }
    }
    for (Eigen::Index k = first; k <= last; ++k) CHECK(bank(m, k) > 0.0);
  }
  CHECK_THROWS_AS(MelFilterbank(80, 1024, 16000, 4000.0, 3000.0), ArgumentError);
  CHECK_THROWS_AS(MelFilterbank(80, 1024, 16000, 0.0, 9000.0), ArgumentError);

  MagnitudeSpectrogram m1, m2, combo, zero;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  m1.values = RealMatrix::NullaryExpr(7, 513, [&] { return u(rng); });
  m2.values = RealMatrix::NullaryExpr(7, 513, [&] { return u(rng); });
  combo.values = 0.7 * m1.values + 2.0 * m2.values;
  zero.values = RealMatrix::Zero(7, 513);
  const RealMatrix lhs = MelProject(combo, 80, 0.0, 8000.0).values;
  const RealMatrix rhs = 0.7 * MelProject(m1, 80, 0.0, 8000.0).values +
                         2.0 * MelProject(m2, 80, 0.0, 8000.0).values;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-6);
  const MelSpectrogram z = MelProject(zero, 80, 0.0, 8000.0);
  CHECK(z.values.rows() == 7);
  CHECK(z.values.cols() == 80);
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply_mask matches a scalar loop") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MagnitudeSpectrogram m;
  m.values = RealMatrix::NullaryExpr(3, 5, [&] { return 4.0 * u(rng); });
  Mask k{RealMatrix::NullaryExpr(3, 5, [&] { return u(rng); })};
  const MagnitudeSpectrogram out = ApplyMask(m, k);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) CHECK(out.values(i, j) == m.values(i, j) * k.values(i, j));

  CHECK(ApplyMask(m, Mask{RealMatrix::Ones(3, 5)}).values == m.values);
  CHECK(ApplyMask(m, Mask{RealMatrix::Zero(3, 5)}).values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ApplyMask(m, Mask{RealMatrix::Constant(3, 5, 0.5)}).values == 0.5 * m.values);
  CHECK_THROWS_AS(ApplyMask(m, Mask{RealMatrix::Ones(3, 4)}), ArgumentError);
}

TEST_CASE("mix_at_snr reaches the requested SNR") {
  const Waveform music_long = WhiteNoise(48000, 77, 0.05);
  const Waveform music_short = Sine(330.0, 0.3, 0.2);
  for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Waveform speech = SpeechLike(1000 + seed);
      for (const Waveform* music : {&music_long, &music_short}) {
        const MixResult r = MixAtSnr(speech, *music, snr, seed);
        CHECK(std::abs(OracleSnrDb(speech.samples, r.scaled_music.samples, 16000) -
                       snr) < 0.1);
        for (std::size_t i = 0; i < speech.size(); i += 997)
          CHECK(r.mixture.samples[i] ==
                doctest::Approx(speech.samples[i] + r.scaled_music.samples[i]));
      }
    }
  }
}

TEST_CASE("mix_at_snr is seeded and rejects degenerate inputs") {
  const Waveform speech = SpeechLike(1);
  const Waveform music = WhiteNoise(50000, 2, 0.05);
  CHECK(MixAtSnr(speech, music, 5.0, 42).mixture.samples ==
        MixAtSnr(speech, music, 5.0, 42).mixture.samples);
  CHECK(MixAtSnr(speech, music, 5.0, 42).mixture.samples !=
        MixAtSnr(speech, music, 5.0, 43).mixture.samples);

  Waveform silent = speech;
  std::fill(silent.samples.begin(), silent.samples.end(), 0.0);
  CHECK_THROWS_AS(MixAtSnr(silent, music, 0.0, 1), DataError);
  Waveform silent_music = music;
  std::fill(silent_music.samples.begin(), silent_music.samples.end(), 0.0);
  CHECK_THROWS_AS(MixAtSnr(speech, silent_music, 0.0, 1), DataError);
  CHECK_THROWS_AS(MixAtSnr(speech, music, std::numeric_limits<double>::infinity(), 1),
                  ArgumentError);
  Waveform other_rate = music;
  other_rate.sample_rate = 8000;
  CHECK_THROWS_AS(MixAtSnr(speech, other_rate, 0.0, 1), ArgumentError);
  // Very high SNR drives the gain towards zero without breaking.
  const MixResult quiet = MixAtSnr(speech, music, 200.0, 1);
  CHECK(quiet.gain < 1e-8);
}

TEST_CASE("griffin_lim on a tone converges and is monotone") {
  const StftParams params;
  const MagnitudeSpectrogram mag = Magnitude(Stft(Sine(440.0, 1.0), params));
  const GriffinLimResult r = GriffinLim(mag, 60, 1);
  REQUIRE(r.residuals.size() == 60);
  CHECK(r.residuals.back() < 0.1);
  for (std::size_t k = 1; k < r.residuals.size(); ++k)
    CHECK(r.residuals[k] <= r.residuals[k - 1] + 1e-7);
  CHECK(r.wave.size() == static_cast<std::size_t>(mag.num_frames() - 1) * 256);
}

TEST_CASE("griffin_lim residual is monotone on random magnitudes") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StftParams params;
  params.fft_size = params.win_size = 256;
  params.hop_size = 64;
  for (int trial = 0; trial < 20; ++trial) {
    MagnitudeSpectrogram mag;
    mag.params = params;
    mag.values = RealMatrix::NullaryExpr(20, 129, [&] { return u(rng); });
    const GriffinLimResult r = GriffinLim(mag, 15, trial);
    for (std::size_t k = 1; k < r.residuals.size(); ++k)
      CHECK(r.residuals[k] <= r.residuals[k - 1] + 1e-7);
  }
}

TEST_CASE("griffin_lim of zero magnitude is silence") {
  MagnitudeSpectrogram zero;
  zero.values = RealMatrix::Zero(10, 513);
  const GriffinLimResult r = GriffinLim(zero, 5, 0);
  CHECK(r.wave.size() == 9 * 256);
  for (double s : r.wave.samples) CHECK(s == 0.0);
  CHECK_THROWS_AS(GriffinLim(zero, 0, 0), ArgumentError);
}

TEST_CASE("si_snr and lsd") {
  const Waveform w = WhiteNoise(4000, 4);
  Waveform doubled = w;
  for (double& s : doubled.samples) s *= 2.0;
  CHECK(SiSnr(w, w) == kSiSnrCapDb);
  CHECK(SiSnr(w, doubled) == kSiSnrCapDb);

  Waveform noisy = w;
  const Waveform n = WhiteNoise(4000, 5, 0.05);
  for (std::size_t i = 0; i < w.size(); ++i) noisy.samples[i] += n.samples[i];
  Waveform noisy_scaled = noisy;
  for (double& s : noisy_scaled.samples) s *= 3.7;
  CHECK(SiSnr(w, noisy) == doctest::Approx(SiSnr(w, noisy_scaled)).epsilon(1e-9));
  CHECK(std::abs(SiSnr(w, noisy) - 6.02) < 0.3);

  Waveform zero = w;
  std::fill(zero.samples.begin(), zero.samples.end(), 0.0);
  CHECK_THROWS_AS(SiSnr(zero, w), ArgumentError);
  CHECK_THROWS_AS(SiSnr(w, WhiteNoise(10, 1)), ArgumentError);

  const MagnitudeSpectrogram a = Magnitude(Stft(w, StftParams{}));
  MagnitudeSpectrogram b = a;
  b.values *= 10.0;
  CHECK(LogSpectralDistance(a, a) == 0.0);
  CHECK(LogSpectralDistance(a, b) == doctest::Approx(20.0).epsilon(0.02));
}

TEST_CASE("downsample_mel_time") {
  MelSpectrogram mel;
  mel.values.resize(100, 80);
  for (Eigen::Index i = 0; i < mel.values.size(); ++i) mel.values.data()[i] = i;
  CHECK(DownsampleMelTime(mel, 1).values == mel.values);
  const MelSpectrogram d = DownsampleMelTime(mel, 4);
  CHECK(d.values.rows() == 25);
  for (Eigen::Index t = 0; t < 25; ++t) CHECK(d.values.row(t) == mel.values.row(4 * t));
  mel.values.conservativeResize(101, 80);
  CHECK(DownsampleMelTime(mel, 4).values.rows() == 26);
  CHECK_THROWS_AS(DownsampleMelTime(mel, 0), ArgumentError);
}

TEST_CASE("log range normalizer round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-4, 50.0);
  RealMatrix v = RealMatrix::NullaryExpr(6, 9, [&] { return u(rng); });
  LogRangeNormalizer norm;
  norm.Accumulate(v, true);
  const RealMatrix n = norm.Normalize(v);
  CHECK(n.minCoeff() >= 0.0);
  CHECK(n.maxCoeff() <= 1.0);
  CHECK((norm.Denormalize(n) - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("wav io round trip and rate check") {
  const auto dir = bgmtts::testing::ScratchDir("wav");
  Waveform w = Sine(200.0, 0.1, 0.9);
  WriteWav(dir / "a.wav", w);
  const Waveform r = ReadWav(dir / "a.wav", 16000);
  REQUIRE(r.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(std::abs(r.samples[i] - w.samples[i]) <= 0.5 / 32768.0 + 1e-12);
  CHECK_THROWS_AS(ReadWav(dir / "a.wav", 22050), DataError);
  CHECK_THROWS_AS(ReadWav(dir / "missing.wav"), DataError);
}
