// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/corpus/manifest.h"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "bgmtts/base/error.h"

namespace bgmtts::corpus {

const char* QualityName(Quality q) {
  switch (q) {
    case Quality::kClean: return "clean";
    case Quality::kNoisy: return "noisy";
    case Quality::kFiltered: return "filtered";
  }
  return "?";
}

Quality ParseQuality(const std::string& name) {
  if (name == "clean") return Quality::kClean;
  if (name == "noisy") return Quality::kNoisy;
  if (name == "filtered") return Quality::kFiltered;
  throw DataError("unknown quality label '" + name + "'");
}

const char* SplitName(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw DataError("unknown split '" + name + "'");
}

std::string ToJsonLine(const UtteranceRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["audio_path"] = r.audio_path;
  j["transcript"] = r.transcript;
  j["quality"] = QualityName(r.quality);
  if (r.snr_db) j["snr_db"] = *r.snr_db;
  j["duration_s"] = r.duration_s;
  j["split"] = SplitName(r.split);
  return j.dump();
}

UtteranceRecord ParseJsonLine(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest line: ") + e.what());
  }
  static const std::set<std::string> kFields = {"id", "audio_path", "transcript", "quality",
                                                "snr_db", "duration_s", "split"};
  for (const auto& [key, value] : j.items())
    if (!kFields.count(key)) throw DataError("unexpected manifest field '" + key + "'");
  UtteranceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.audio_path = j.at("audio_path").get<std::string>();
    r.transcript = j.at("transcript").get<std::string>();
    r.quality = ParseQuality(j.at("quality").get<std::string>());
    if (j.contains("snr_db")) r.snr_db = j["snr_db"].get<double>();
    r.duration_s = j.at("duration_s").get<double>();
    r.split = ParseSplit(j.at("split").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad manifest record: ") + e.what());
  }
  if (r.snr_db.has_value() == (r.quality == Quality::kClean))
    throw DataError("record " + r.id + ": snr_db must be present iff quality is not clean");
  if (!(r.duration_s > 0.0)) throw DataError("record " + r.id + ": non-positive duration");
  return r;
}

dsp::Waveform Manifest::Load(const UtteranceRecord& r) const {
  return dsp::ReadWav(AudioPath(r), dsp::kDefaultSampleRate);
}

const UtteranceRecord* Manifest::Find(const std::string& id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

double Manifest::TotalSeconds() const {
  double total = 0.0;
  for (const auto& r : records) total += r.duration_s;
  return total;
}

std::vector<UtteranceRecord> Manifest::Select(Split split) const {
  std::vector<UtteranceRecord> out;
  for (const auto& r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

void Manifest::Validate() const {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw DataError("duplicate utterance id " + r.id);
    if (r.snr_db.has_value() == (r.quality == Quality::kClean))
      throw DataError("record " + r.id + ": snr_db must be present iff quality is not clean");
    if (!(r.duration_s > 0.0)) throw DataError("record " + r.id + ": non-positive duration");
  }
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    m.records.push_back(ParseJsonLine(line));
  }
  m.Validate();
  return m;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& m) {
  m.Validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path.string());
  for (const auto& r : m.records) out << ToJsonLine(r) << '\n';
}

}  // namespace bgmtts::corpus
