// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/corpus/toy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/mix.h"

namespace bgmtts::corpus {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class PhoneKind { kVowel, kSonorant, kFricative, kPlosive, kPause };

struct Phone {
  char symbol;
  PhoneKind kind;
  double duration_s;
  double f1, f2, f3;
  double voicing;       // glottal source amplitude
  double noise;         // frication amplitude
  double noise_hz;      // frication centre
  double noise_bw_hz;   // frication bandwidth
};

// Formant targets loosely follow adult vowel charts.
constexpr Phone kPhones[] = {
    {'a', PhoneKind::kVowel, 0.12, 800, 1250, 2600, 1.0, 0.0, 0, 0},
    {'e', PhoneKind::kVowel, 0.11, 450, 1900, 2600, 1.0, 0.0, 0, 0},
    {'i', PhoneKind::kVowel, 0.10, 300, 2300, 3000, 0.9, 0.0, 0, 0},
    {'o', PhoneKind::kVowel, 0.12, 500, 850, 2450, 1.0, 0.0, 0, 0},
    {'u', PhoneKind::kVowel, 0.11, 330, 800, 2250, 0.9, 0.0, 0, 0},
    {'l', PhoneKind::kSonorant, 0.07, 380, 1000, 2600, 0.6, 0.0, 0, 0},
    {'m', PhoneKind::kSonorant, 0.07, 280, 1100, 2200, 0.45, 0.0, 0, 0},
    {'n', PhoneKind::kSonorant, 0.07, 300, 1500, 2500, 0.45, 0.0, 0, 0},
    {'r', PhoneKind::kSonorant, 0.07, 450, 1200, 1700, 0.65, 0.0, 0, 0},
    {'s', PhoneKind::kFricative, 0.10, 0, 0, 0, 0.0, 0.5, 5500, 2500},
    {'f', PhoneKind::kFricative, 0.09, 0, 0, 0, 0.0, 0.3, 3000, 4000},
    {'k', PhoneKind::kPlosive, 0.07, 0, 0, 0, 0.0, 0.7, 1800, 800},
    {'t', PhoneKind::kPlosive, 0.07, 0, 0, 0, 0.0, 0.7, 4000, 1500},
    {'p', PhoneKind::kPlosive, 0.06, 0, 0, 0, 0.0, 0.6, 900, 1200},
    {' ', PhoneKind::kPause, 0.06, 0, 0, 0, 0.0, 0.0, 0, 0},
};

const Phone& LookupPhone(char c) {
  for (const Phone& p : kPhones)
    if (p.symbol == c) return p;
  throw ArgumentError(std::string("toy synthesizer has no phone for '") + c + "'");
}

// Two-pole resonator with unit gain at DC.
class Resonator {
 public:
  void Set(double freq, double bandwidth, int rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth / rate);
    b1_ = 2.0 * r * std::cos(kTwoPi * freq / rate);
    b2_ = -r * r;
    a0_ = 1.0 - b1_ - b2_;
  }
  // Band-pass variant: unit gain at the centre frequency (approximately).
  void SetBandPass(double freq, double bandwidth, int rate) {
    Set(freq, bandwidth, rate);
    const double r = std::sqrt(-b2_);
    a0_ = (1.0 - r) * 2.0;
  }
  double Process(double x) {
    const double y = a0_ * x + b1_ * y1_ + b2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a0_ = 1.0, b1_ = 0.0, b2_ = 0.0, y1_ = 0.0, y2_ = 0.0;
};

void Smooth(std::vector<double>& track, double seconds, int rate) {
  const double a = std::exp(-1.0 / (seconds * rate));
  double state = track.empty() ? 0.0 : track.front();
  for (double& v : track) {
    state = a * state + (1.0 - a) * v;
    v = state;
  }
}

// The active region depends on the level, so rescale until it settles.
void NormalizeActiveRms(dsp::Waveform& w, double level_rms) {
  for (int pass = 0; pass < 8; ++pass) {
    const double power = dsp::ActivePower(w, dsp::ActiveSamples(w));
    if (power <= 0.0) return;
    const double g = level_rms / std::sqrt(power);
    if (std::abs(g - 1.0) < 1e-9) return;
    for (double& s : w.samples) s *= g;
  }
}

}  // namespace

std::vector<ToySpeaker> ToySpeakers(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> f0(90.0, 260.0), scale(0.85, 1.2), rate(0.85, 1.2);
  std::vector<ToySpeaker> out;
  for (int i = 0; i < count; ++i) {
    ToySpeaker s;
    if (i > 0) {
      s.f0_hz = f0(rng);
      s.formant_scale = scale(rng);
      s.rate = rate(rng);
    }
    out.push_back(s);
  }
  return out;
}

std::string RandomToySentence(std::mt19937_64& rng) {
  static const std::string kVowels = "aeiou";
  static const std::string kConsonants = "lmnrsfktp";
  std::uniform_int_distribution<int> words(2, 4), letters(2, 5), coin(0, 1);
  std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1),
      consonant(0, kConsonants.size() - 1);
  std::string out;
  const int n = words(rng);
  for (int w = 0; w < n; ++w) {
    if (w) out += ' ';
    const int len = letters(rng);
    bool want_vowel = coin(rng) == 1;
    for (int i = 0; i < len; ++i) {
      out += want_vowel ? kVowels[vowel(rng)] : kConsonants[consonant(rng)];
      want_vowel = !want_vowel;
    }
  }
  return out;
}

dsp::Waveform SynthesizeToySpeech(const std::string& text, const ToySpeaker& speaker,
                                  std::uint64_t seed, int sample_rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  const int lead = static_cast<int>(0.1 * sample_rate);

  // Per-sample targets.
  std::vector<double> f1, f2, f3, voice, noise, noise_hz, noise_bw;
  double last_f1 = 500, last_f2 = 1500, last_f3 = 2500;
  auto push = [&](int n, double a, double b, double c, double v, double nz, double hz,
                  double bw) {
    for (int i = 0; i < n; ++i) {
      f1.push_back(a); f2.push_back(b); f3.push_back(c);
      voice.push_back(v); noise.push_back(nz);
      noise_hz.push_back(hz); noise_bw.push_back(bw);
    }
  };
  push(lead, last_f1, last_f2, last_f3, 0, 0, 1000, 1000);
  for (char c : text) {
    const Phone& p = LookupPhone(c);
    const double dur = p.duration_s / speaker.rate * (1.0 + jitter(rng));
    const int n = std::max(1, static_cast<int>(dur * sample_rate));
    if (p.kind == PhoneKind::kVowel || p.kind == PhoneKind::kSonorant) {
      last_f1 = p.f1 * speaker.formant_scale;
      last_f2 = p.f2 * speaker.formant_scale;
      last_f3 = p.f3 * speaker.formant_scale;
      push(n, last_f1, last_f2, last_f3, p.voicing, 0.0, 1000, 1000);
    } else if (p.kind == PhoneKind::kFricative) {
      push(n, last_f1, last_f2, last_f3, 0.0, p.noise, p.noise_hz * speaker.formant_scale,
           p.noise_bw_hz);
    } else if (p.kind == PhoneKind::kPlosive) {
      const int closure = n * 4 / 7;
      push(closure, last_f1, last_f2, last_f3, 0.0, 0.0, p.noise_hz, p.noise_bw_hz);
      push(n - closure, last_f1, last_f2, last_f3, 0.0, p.noise,
           p.noise_hz * speaker.formant_scale, p.noise_bw_hz);
    } else {
      push(n, last_f1, last_f2, last_f3, 0.0, 0.0, 1000, 1000);
    }
  }
  push(lead, last_f1, last_f2, last_f3, 0, 0, 1000, 1000);

  for (auto* track : {&f1, &f2, &f3}) Smooth(*track, 0.012, sample_rate);
  for (auto* track : {&voice, &noise}) Smooth(*track, 0.004, sample_rate);

  const std::size_t total = f1.size();
  dsp::Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(total, 0.0);
  Resonator r1, r2, r3, fric;
  const double phase_offset = std::uniform_real_distribution<double>(0, kTwoPi)(rng);
  const double vibrato_hz = 4.0 + jitter(rng) * 20.0;
  double phase = 0.0, tilt = 0.0;
  const double t_total = static_cast<double>(total) / sample_rate;
  for (std::size_t i = 0; i < total; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    // Declining intonation with slow vibrato.
    const double f0 = speaker.f0_hz * (1.1 - 0.2 * t / t_total) *
                      (1.0 + 0.02 * std::sin(kTwoPi * vibrato_hz * t + phase_offset));
    phase += f0 / sample_rate;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    tilt = 0.9 * tilt + pulse;  // spectral tilt of the glottal source
    const double source = voice[i] * (tilt + 0.03 * gauss(rng));
    if (i % 32 == 0) {
      r1.Set(f1[i], 60.0, sample_rate);
      r2.Set(f2[i], 90.0, sample_rate);
      r3.Set(f3[i], 150.0, sample_rate);
      fric.SetBandPass(noise_hz[i], noise_bw[i], sample_rate);
    }
    const double voiced = r3.Process(r2.Process(r1.Process(source)));
    const double unvoiced = fric.Process(noise[i] * gauss(rng)) * 8.0;
    out.samples[i] = voiced + unvoiced;
  }
  NormalizeActiveRms(out, speaker.level_rms);
  return out;
}

dsp::Waveform SynthesizeToyMusic(double seconds, std::uint64_t seed, int sample_rate,
                                 double level_rms) {
  if (!(seconds > 0.0)) throw ArgumentError("music duration must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  std::vector<double> pad(n, 0.0), melody(n, 0.0), kick(n, 0.0), hat(n, 0.0);

  const double tempo = 80.0 + 60.0 * unit(rng);
  const double beat = 60.0 / tempo;
  const double root = 100.0 * std::pow(2.0, unit(rng));
  const int kScale[] = {0, 2, 4, 7, 9};
  auto degree_hz = [&](int degree) {
    const int octave = degree >= 0 ? degree / 5 : (degree - 4) / 5;
    const int step = degree - 5 * octave;
    return root * std::pow(2.0, octave + kScale[step] / 12.0);
  };
  auto add_tone = [&](std::vector<double>& dst, double start, double length, double freq,
                      int harmonics, double rolloff, double attack, double decay,
                      double amp) {
    const std::size_t s0 = static_cast<std::size_t>(start * sample_rate);
    const std::size_t len = static_cast<std::size_t>(length * sample_rate);
    const double nyquist = 0.5 * sample_rate;
    for (std::size_t i = 0; i < len && s0 + i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      double env = std::min(1.0, t / attack);
      env *= decay > 0.0 ? std::exp(-t / decay) : 1.0;
      env *= std::min(1.0, (length - t) / 0.05);  // release
      double v = 0.0;
      for (int k = 1; k <= harmonics && k * freq < nyquist; ++k)
        v += std::sin(kTwoPi * k * freq * t) / std::pow(k, rolloff);
      dst[s0 + i] += amp * env * v;
    }
  };

  // Chords: one per bar.
  for (double bar = 0.0; bar < seconds; bar += 4 * beat) {
    const int base = static_cast<int>(unit(rng) * 5);
    for (int voice : {0, 2, 4}) {
      add_tone(pad, bar, 4 * beat, degree_hz(base + voice) * (1.0 + 0.002 * gauss(rng)), 10,
               1.2, 0.05, 0.0, 0.3);
    }
  }
  // Melody: plucked notes on beats and off-beats.
  for (double t = 0.0; t < seconds; t += beat / 2) {
    if (unit(rng) < 0.3) continue;
    const int degree = 5 + static_cast<int>(unit(rng) * 10);
    add_tone(melody, t, beat / 2, degree_hz(degree), 6, 2.0, 0.005, 0.25, 0.5);
  }
  // Drums.
  for (double t = 0.0; t < seconds; t += beat) {
    const int beat_index = static_cast<int>(std::lround(t / beat)) % 4;
    const std::size_t s0 = static_cast<std::size_t>(t * sample_rate);
    if (beat_index == 0 || beat_index == 2) {
      double ph = 0.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(0.3 * sample_rate) && s0 + i < n;
           ++i) {
        const double u = static_cast<double>(i) / sample_rate;
        ph += (45.0 + 75.0 * std::exp(-u / 0.04)) / sample_rate;
        kick[s0 + i] += std::sin(kTwoPi * ph) * std::exp(-u / 0.12);
      }
    }
    for (double off : {0.0, beat / 2}) {
      const std::size_t h0 = static_cast<std::size_t>((t + off) * sample_rate);
      double prev = 0.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(0.08 * sample_rate) && h0 + i < n;
           ++i) {
        const double u = static_cast<double>(i) / sample_rate;
        const double x = gauss(rng);
        hat[h0 + i] += (x - prev) * std::exp(-u / 0.03);
        prev = x;
      }
    }
  }

  auto rms = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / std::max<std::size_t>(1, v.size()));
  };
  dsp::Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0);
  const double weights[] = {0.4, 0.35, 0.5, 0.15};
  const std::vector<double>* parts[] = {&pad, &melody, &kick, &hat};
  for (int p = 0; p < 4; ++p) {
    const double r = rms(*parts[p]);
    if (r <= 0.0) continue;
    const double g = weights[p] * (0.5 + unit(rng)) / r;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] += g * (*parts[p])[i];
  }
  const double r = rms(out.samples);
  if (r > 0.0)
    for (double& s : out.samples) s *= level_rms / r;
  return out;
}

Manifest MakeToySpeechCorpus(const std::filesystem::path& dir, const ToyCorpusConfig& config) {
  if (config.num_utterances < 1 || config.num_speakers < 1)
    throw ArgumentError("toy corpus needs at least one utterance and one speaker");
  std::filesystem::create_directories(dir / "wav");
  const auto speakers = ToySpeakers(config.num_speakers, config.seed ^ 0x5eedULL);
  std::mt19937_64 rng(config.seed);
  Manifest m;
  m.base_dir = dir;
  for (int i = 0; i < config.num_utterances; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s_%04d", config.id_prefix.c_str(), i);
    const std::string text = RandomToySentence(rng);
    const ToySpeaker& speaker = speakers[i % speakers.size()];
    const dsp::Waveform w = SynthesizeToySpeech(text, speaker, rng());
    UtteranceRecord r;
    r.id = id;
    r.audio_path = "wav/" + r.id + ".wav";
    r.transcript = text;
    r.quality = Quality::kClean;
    r.duration_s = w.duration_s();
    r.split = Split::kTrain;
    dsp::WriteWav(dir / r.audio_path, w);
    m.records.push_back(std::move(r));
  }
  WriteManifest(dir / "manifest.jsonl", m);
  return m;
}

void MakeToyMusicDir(const std::filesystem::path& dir, int count, double seconds,
                     std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "music_%03d.wav", i);
    dsp::WriteWav(dir / name, SynthesizeToyMusic(seconds, rng()));
  }
}

}  // namespace bgmtts::corpus
