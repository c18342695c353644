// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_CORPUS_TOY_H_
#define BGMTTS_CORPUS_TOY_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/dsp/waveform.h"

namespace bgmtts::corpus {

// Letters understood by the toy speech synthesizer (plus space).
inline constexpr const char* kToyAlphabet = "aeioulmnrsfktp";

// Voice of a toy speaker. The formant synthesizer is deterministic given
// speaker, text and seed.
struct ToySpeaker {
  double f0_hz = 140.0;
  double formant_scale = 1.0;  // multiplies every formant frequency
  double rate = 1.0;           // > 1 speaks faster
  double level_rms = 0.05;     // RMS over the voiced region
};

// Speaker 0 is the default voice; the others are seeded perturbations of
// pitch, vocal-tract length and tempo.
std::vector<ToySpeaker> ToySpeakers(int count, std::uint64_t seed);

// Pronounceable random sentence of 2-4 words over kToyAlphabet.
std::string RandomToySentence(std::mt19937_64& rng);

// Formant synthesis: glottal pulse train through three resonators for
// vowels and sonorants, band-passed noise for fricatives and bursts.
// Characters outside kToyAlphabet (other than space) throw ArgumentError.
dsp::Waveform SynthesizeToySpeech(const std::string& text, const ToySpeaker& speaker,
                                  std::uint64_t seed,
                                  int sample_rate = dsp::kDefaultSampleRate);

// Chord pads, a plucked melody, kick and hi-hat on a random tempo.
dsp::Waveform SynthesizeToyMusic(double seconds, std::uint64_t seed,
                                 int sample_rate = dsp::kDefaultSampleRate,
                                 double level_rms = 0.05);

struct ToyCorpusConfig {
  int num_utterances = 200;
  int num_speakers = 1;
  std::uint64_t seed = 0;
  std::string id_prefix = "utt";
};

// Writes <dir>/wav/<id>.wav and <dir>/manifest.jsonl (all CLEAN, TRAIN).
Manifest MakeToySpeechCorpus(const std::filesystem::path& dir, const ToyCorpusConfig& config);

// Writes <count> music files of `seconds` each into dir.
void MakeToyMusicDir(const std::filesystem::path& dir, int count, double seconds,
                     std::uint64_t seed);

}  // namespace bgmtts::corpus

#endif  // BGMTTS_CORPUS_TOY_H_
