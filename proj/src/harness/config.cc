// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/harness/config.h"

#include <fstream>

#include "bgmtts/base/error.h"

namespace bgmtts::harness {

namespace {

using nlohmann::json;

json AdamJson(const nn::AdamConfig& a) {
  return {{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps},
          {"clip_norm", a.clip_norm}};
}

nn::AdamConfig AdamFromJson(const json& j) {
  nn::AdamConfig a;
  a.lr = j.at("lr");
  a.beta1 = j.at("beta1");
  a.beta2 = j.at("beta2");
  a.eps = j.at("eps");
  a.clip_norm = j.at("clip_norm");
  return a;
}

// Rejects keys of `patch` that `base` does not have, recursing into objects.
void CheckKnownKeys(const json& base, const json& patch, const std::string& where) {
  if (!patch.is_object() || !base.is_object()) return;
  for (const auto& [key, value] : patch.items()) {
    if (!base.contains(key)) throw ArgumentError("unknown config key " + where + key);
    CheckKnownKeys(base.at(key), value, where + key + ".");
  }
}

}  // namespace

PipelineConfig PipelineConfig::Defaults() {
  PipelineConfig c;
  c.filter_train.steps = 600;
  c.filter_train.crop_frames = 32;
  c.tts_train.steps = 400;
  c.tts_train.batch_size = 8;
  c.ssrn_train.steps = 200;
  return c;
}

void to_json(json& j, const PipelineConfig& c) {
  const ToyDataConfig& d = c.data;
  j = json::object();
  j["seed"] = c.seed;
  j["data"] = {{"utterances", d.utterances},
               {"universal_utterances", d.universal_utterances},
               {"universal_speakers", d.universal_speakers},
               {"filter_music_files", d.filter_music_files},
               {"target_music_files", d.target_music_files},
               {"music_seconds", d.music_seconds},
               {"snr_lo_db", d.snr_lo_db},
               {"snr_hi_db", d.snr_hi_db},
               {"test_fraction", d.test_fraction}};
  j["features"] = c.features;
  j["filter"] = c.filter;
  j["filter_train"] = {{"adam", AdamJson(c.filter_train.adam)},
                       {"steps", c.filter_train.steps},
                       {"batch_size", c.filter_train.batch_size},
                       {"crop_frames", c.filter_train.crop_frames}};
  j["tts"] = c.tts;
  j["tts_train"] = {{"adam", AdamJson(c.tts_train.adam)},
                    {"steps", c.tts_train.steps},
                    {"batch_size", c.tts_train.batch_size},
                    {"ga_weight", c.tts_train.ga_weight},
                    {"ga_width", c.tts_train.ga_width},
                    {"stop_aqc_gradient", c.tts_train.stop_aqc_gradient}};
  j["lambda"] = c.lambda ? json(*c.lambda) : json("auto");
  j["ssrn"] = c.ssrn;
  j["ssrn_train"] = {{"adam", AdamJson(c.ssrn_train.adam)},
                     {"steps", c.ssrn_train.steps},
                     {"batch_size", c.ssrn_train.batch_size},
                     {"crop_frames", c.ssrn_train.crop_frames}};
  j["clean_ratios"] = c.clean_ratios;
  j["variants"] = c.variants;
  j["divergence"] = {{"reference_step", c.divergence.reference_step},
                     {"factor", c.divergence.factor}};
  j["max_frames"] = c.max_frames;
  j["griffin_lim_iters"] = c.griffin_lim_iters;
}

void from_json(const json& patch, PipelineConfig& c) {
  json j = c;
  CheckKnownKeys(j, patch, "");
  j.merge_patch(patch);
  try {
    c.seed = j.at("seed");
    const json& d = j.at("data");
    c.data.utterances = d.at("utterances");
    c.data.universal_utterances = d.at("universal_utterances");
    c.data.universal_speakers = d.at("universal_speakers");
    c.data.filter_music_files = d.at("filter_music_files");
    c.data.target_music_files = d.at("target_music_files");
    c.data.music_seconds = d.at("music_seconds");
    c.data.snr_lo_db = d.at("snr_lo_db");
    c.data.snr_hi_db = d.at("snr_hi_db");
    c.data.test_fraction = d.at("test_fraction");
    c.features = j.at("features").get<dsp::FeatureConfig>();
    c.filter = j.at("filter").get<musicfilter::MusicFilterConfig>();
    const json& ft = j.at("filter_train");
    c.filter_train.adam = AdamFromJson(ft.at("adam"));
    c.filter_train.steps = ft.at("steps");
    c.filter_train.batch_size = ft.at("batch_size");
    c.filter_train.crop_frames = ft.at("crop_frames");
    c.tts = j.at("tts").get<gsttts::Text2MelConfig>();
    const json& tt = j.at("tts_train");
    c.tts_train.adam = AdamFromJson(tt.at("adam"));
    c.tts_train.steps = tt.at("steps");
    c.tts_train.batch_size = tt.at("batch_size");
    c.tts_train.ga_weight = tt.at("ga_weight");
    c.tts_train.ga_width = tt.at("ga_width");
    c.tts_train.stop_aqc_gradient = tt.at("stop_aqc_gradient");
    const json& lambda = j.at("lambda");
    if (lambda.is_string()) {
      if (lambda != "auto") throw ArgumentError("lambda must be a number or \"auto\"");
      c.lambda.reset();
    } else {
      c.lambda = lambda.get<double>();
    }
    c.ssrn = j.at("ssrn").get<ssrn::SsrnConfig>();
    const json& st = j.at("ssrn_train");
    c.ssrn_train.adam = AdamFromJson(st.at("adam"));
    c.ssrn_train.steps = st.at("steps");
    c.ssrn_train.batch_size = st.at("batch_size");
    c.ssrn_train.crop_frames = st.at("crop_frames");
    c.clean_ratios = j.at("clean_ratios").get<std::vector<double>>();
    c.variants = j.at("variants").get<std::vector<std::string>>();
    c.divergence.reference_step = j.at("divergence").at("reference_step");
    c.divergence.factor = j.at("divergence").at("factor");
    c.max_frames = j.at("max_frames");
    c.griffin_lim_iters = j.at("griffin_lim_iters");
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("invalid config: ") + e.what());
  }
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config " + path.string());
  json patch;
  try {
    patch = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  PipelineConfig c = PipelineConfig::Defaults();
  from_json(patch, c);
  return c;
}

}  // namespace bgmtts::harness
