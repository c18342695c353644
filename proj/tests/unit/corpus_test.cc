// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.h"

#include "bgmtts/base/error.h"
#include "bgmtts/corpus/build.h"
#include "bgmtts/corpus/manifest.h"
#include "bgmtts/corpus/text.h"
#include "bgmtts/corpus/toy.h"
#include "bgmtts/dsp/mix.h"

namespace bgmtts::corpus {
namespace {

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("manifest lines survive re-serialization") {
  UtteranceRecord a{"u1", "wav/u1.wav", "la mi", Quality::kClean, std::nullopt, 1.25,
                    Split::kTrain};
  UtteranceRecord b{"u2", "wav/u2.wav", "so", Quality::kNoisy, 7.123456789012345, 0.5,
                    Split::kTest};
  for (const auto& r : {a, b}) {
    const std::string line = ToJsonLine(r);
    CHECK(ParseJsonLine(line) == r);
    CHECK(ToJsonLine(ParseJsonLine(line)) == line);
  }
  CHECK(ToJsonLine(a).find("snr_db") == std::string::npos);
  CHECK(ToJsonLine(b) ==
        R"({"id":"u2","audio_path":"wav/u2.wav","transcript":"so","quality":"noisy",)"
        R"("snr_db":7.123456789012345,"duration_s":0.5,"split":"test"})");
}

TEST_CASE("manifest records enforce their invariants") {
  CHECK_THROWS_AS(ParseJsonLine(R"({"id":"x","audio_path":"a","transcript":"t",)"
                                R"("quality":"clean","snr_db":3,"duration_s":1,"split":"train"})"),
                  DataError);
  CHECK_THROWS_AS(ParseJsonLine(R"({"id":"x","audio_path":"a","transcript":"t",)"
                                R"("quality":"filtered","duration_s":1,"split":"train"})"),
                  DataError);
  CHECK_THROWS_AS(ParseJsonLine(R"({"id":"x","audio_path":"a","transcript":"t",)"
                                R"("quality":"clean","duration_s":0,"split":"train"})"),
                  DataError);
  CHECK_THROWS_AS(ParseJsonLine(R"({"id":"x","audio_path":"a","transcript":"t","extra":1,)"
                                R"("quality":"clean","duration_s":1,"split":"train"})"),
                  DataError);
  Manifest m;
  m.records = {UtteranceRecord{"d", "a", "", Quality::kClean, {}, 1, Split::kTrain},
               UtteranceRecord{"d", "b", "", Quality::kClean, {}, 1, Split::kTrain}};
  CHECK_THROWS_AS(m.Validate(), DataError);
}

TEST_CASE("text normalization") {
  CHECK(NormalizeText("  Hello\t\tWORLD \n") == "hello world");
  CHECK(NormalizeText("") == "");
  // Decomposed e + combining acute composes to U+00E9.
  CHECK(NormalizeText("E\xCC\x81t\xC3\xA9") == "\xC3\xA9t\xC3\xA9");
  CHECK(SplitCodePoints("\xC3\xA9t").size() == 2);
}

TEST_CASE("character vocabulary encodes and decodes") {
  const auto v = CharVocabulary::FromSymbols({"a", "b"});
  CHECK(v.IndexOf("a") == 2);
  CHECK(v.Encode("") == std::vector<int>{CharVocabulary::kEos});
  CHECK(v.Encode("AB") == std::vector<int>{2, 3, CharVocabulary::kEos});
  CHECK_THROWS_WITH_AS(v.Encode("abxyx"), doctest::Contains("'x', 'y'"), DataError);

  const std::vector<std::string> texts = {"Lamu Sita", "  pofe\tkunu ", "mira"};
  const auto vocab = CharVocabulary::FromTranscripts(texts);
  CHECK(vocab.symbols()[0] == "<pad>");
  CHECK(vocab.symbols()[1] == "<eos>");
  for (const auto& t : texts) {
    const auto ids = vocab.Encode(t);
    CHECK(ids.size() == SplitCodePoints(NormalizeText(t)).size() + 1);
    CHECK(vocab.Decode(ids) == NormalizeText(t));
  }
  CHECK(CharVocabulary::FromJson(vocab.ToJson()) == vocab);
}

TEST_CASE("toy speech is deterministic, finite and at the requested level") {
  ToySpeaker s;
  const auto a = SynthesizeToySpeech("lamu sita", s, 5);
  const auto b = SynthesizeToySpeech("lamu sita", s, 5);
  const auto c = SynthesizeToySpeech("lamu sita", s, 6);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK_NOTHROW(a.Validate());
  CHECK(a.duration_s() > 0.8);
  CHECK(a.duration_s() < 2.0);
  const double p = dsp::ActivePower(a, dsp::ActiveSamples(a));
  CHECK(std::sqrt(p) == doctest::Approx(0.05).epsilon(1e-6));
  double peak = 0.0;
  for (double x : a.samples) peak = std::max(peak, std::abs(x));
  CHECK(peak < 0.8);
  CHECK_THROWS_AS(SynthesizeToySpeech("hello", s, 1), ArgumentError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const std::string t = RandomToySentence(rng);
    for (char ch : t) CHECK((ch == ' ' || std::string(kToyAlphabet).find(ch) != std::string::npos));
  }
}

TEST_CASE("toy music is deterministic and at the requested level") {
  const auto a = SynthesizeToyMusic(2.0, 9);
  CHECK(a.samples == SynthesizeToyMusic(2.0, 9).samples);
  CHECK(a.size() == 32000);
  double s = 0.0;
  for (double x : a.samples) s += x * x;
  CHECK(std::sqrt(s / a.size()) == doctest::Approx(0.05).epsilon(1e-6));
}

struct SmallCorpus {
  std::filesystem::path root;
  Manifest clean;

  explicit SmallCorpus(const std::string& name, int n = 12) {
    root = testing::ScratchDir(name);
    ToyCorpusConfig cfg;
    cfg.num_utterances = n;
    cfg.num_speakers = 2;
    cfg.seed = 11;
    clean = MakeToySpeechCorpus(root / "clean", cfg);
    MakeToyMusicDir(root / "music", 3, 4.0, 12);
  }
};

TEST_CASE("mixed corpus: SNR range, realized SNR and determinism") {
  SmallCorpus c("corpus_mix");
  const Manifest noisy = BuildMixedCorpus(c.clean, c.root / "music", 0.0, 20.0, 7, c.root / "n1");
  BuildMixedCorpus(c.clean, c.root / "music", 0.0, 20.0, 7, c.root / "n2");
  CHECK(Slurp(c.root / "n1" / "manifest.jsonl") == Slurp(c.root / "n2" / "manifest.jsonl"));
  REQUIRE(noisy.records.size() == c.clean.records.size());
  const Manifest reread = ReadManifest(c.root / "n1" / "manifest.jsonl");
  CHECK(reread.records == noisy.records);
  for (std::size_t i = 0; i < noisy.records.size(); ++i) {
    const auto& r = noisy.records[i];
    CHECK(r.id == c.clean.records[i].id);
    CHECK(r.transcript == c.clean.records[i].transcript);
    CHECK(r.quality == Quality::kNoisy);
    REQUIRE(r.snr_db.has_value());
    CHECK(*r.snr_db >= 0.0 - 0.1);
    CHECK(*r.snr_db <= 20.0 + 0.1);
    // Re-measure from the files on disk: noise = noisy - clean.
    const auto speech = c.clean.Load(c.clean.records[i]);
    auto music = reread.Load(reread.records[i]);
    for (std::size_t k = 0; k < music.size(); ++k) music.samples[k] -= speech.samples[k];
    CHECK(std::abs(dsp::MeasureSnrDb(speech, music) - *r.snr_db) < 0.1);
  }
  CHECK_THROWS_AS(BuildMixedCorpus(c.clean, c.root / "nope", 0, 20, 1, c.root / "n3"),
                  DataError);
  CHECK_THROWS_AS(BuildMixedCorpus(c.clean, c.root / "music", 5, 1, 1, c.root / "n3"),
                  ArgumentError);
}

TEST_CASE("clean-hours partition") {
  SmallCorpus c("corpus_split", 40);
  const double total_h = c.clean.TotalSeconds() / 3600.0;
  const CleanPartition p = PartitionByCleanHours(c.clean, total_h / 2, total_h, 3, 0.1);
  double max_dur = 0.0;
  for (const auto& r : c.clean.records) max_dur = std::max(max_dur, r.duration_s);
  const double train_s = p.clean_seconds + p.degraded_seconds;
  CHECK(std::abs(p.clean_seconds - train_s / 2) <= max_dur);
  CHECK(p.test_ids.size() == 4);
  std::set<std::string> all;
  for (const auto* ids : {&p.clean_ids, &p.degraded_ids, &p.test_ids})
    for (const auto& id : *ids) CHECK(all.insert(id).second);
  CHECK(all.size() == c.clean.records.size());

  const CleanPartition again = PartitionByCleanHours(c.clean, total_h / 2, total_h, 3, 0.1);
  CHECK(again.clean_ids == p.clean_ids);
  CHECK(again.test_ids == p.test_ids);
  const CleanPartition small = PartitionByCleanHours(c.clean, total_h * 0.1, total_h, 3, 0.1);
  CHECK(std::abs(small.clean_seconds - 0.1 * (small.clean_seconds + small.degraded_seconds)) <=
        max_dur);

  CHECK_THROWS_AS(PartitionByCleanHours(c.clean, total_h, total_h, 3), ArgumentError);
  CHECK_THROWS_AS(PartitionByCleanHours(c.clean, total_h * 0.5, total_h * 2, 3), DataError);
}

TEST_CASE("quality streams share ids and transcripts") {
  SmallCorpus c("corpus_merge", 20);
  const Manifest noisy = BuildMixedCorpus(c.clean, c.root / "music", 0, 20, 1, c.root / "noisy");
  const Manifest filtered =
      FilterCorpus(noisy, [](const dsp::Waveform& w) { return w; }, c.root / "filtered");
  REQUIRE(filtered.records.size() == noisy.records.size());
  for (std::size_t i = 0; i < noisy.records.size(); ++i) {
    CHECK(filtered.records[i].id == noisy.records[i].id);
    CHECK(filtered.records[i].transcript == c.clean.records[i].transcript);
    CHECK(filtered.records[i].quality == Quality::kFiltered);
    CHECK(filtered.records[i].snr_db == noisy.records[i].snr_db);
    CHECK(filtered.Load(filtered.records[i]).samples == noisy.Load(noisy.records[i]).samples);
  }
  const double total_h = c.clean.TotalSeconds() / 3600.0;
  const auto part = PartitionByCleanHours(c.clean, total_h * 0.3, total_h, 5, 0.1);
  const Manifest merged = MergeQualityStreams(part, c.clean, filtered, c.root);
  WriteManifest(c.root / "train.jsonl", merged);
  const Manifest back = ReadManifest(c.root / "train.jsonl");
  CHECK(back.records.size() == c.clean.records.size());
  for (const auto& r : back.records) {
    CHECK(std::filesystem::exists(back.AudioPath(r)));
    const bool is_clean = std::find(part.clean_ids.begin(), part.clean_ids.end(), r.id) !=
                          part.clean_ids.end();
    if (r.split == Split::kTest || is_clean) CHECK(r.quality == Quality::kClean);
    else CHECK(r.quality == Quality::kFiltered);
  }
}

}  // namespace
}  // namespace bgmtts::corpus
