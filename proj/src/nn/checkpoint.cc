// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/checkpoint.h"

#include <cstring>
#include <fstream>

#include "bgmtts/base/error.h"

namespace bgmtts::nn {

namespace {

constexpr char kMagic[8] = {'B', 'G', 'M', 'T', 'T', 'S', 'C', 'K'};

static_assert(sizeof(double) == 8, "float64 payload");

}  // namespace

const Mat* CheckpointData::Find(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return &m;
  return nullptr;
}

void WriteCheckpoint(const std::filesystem::path& path, const CheckpointData& data) {
  nlohmann::json header = data.header;
  header["format_version"] = kCheckpointFormatVersion;
  nlohmann::json index = nlohmann::json::array();
  for (const auto& [name, m] : data.tensors)
    index.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  header["tensors"] = index;
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kMagic, 8);
    std::uint64_t len = text.size();
    unsigned char len_bytes[8];
    for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(len_bytes), 8);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, m] : data.tensors)
      out.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!out) throw DataError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

CheckpointData ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[8];
  unsigned char len_bytes[8];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(len_bytes), 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError(path.string() + " is not a checkpoint file");
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= static_cast<std::uint64_t>(len_bytes[i]) << (8 * i);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  CheckpointData data;
  try {
    data.header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": bad checkpoint header: " + e.what());
  }
  const int version = data.header.value("format_version", -1);
  if (version != kCheckpointFormatVersion)
    throw DataError(path.string() + ": unsupported checkpoint format version " +
                    std::to_string(version));
  for (const auto& entry : data.header.at("tensors")) {
    Mat m(entry.at("rows").get<Eigen::Index>(), entry.at("cols").get<Eigen::Index>());
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw DataError(path.string() + ": truncated checkpoint payload");
    data.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(m));
  }
  return data;
}

CheckpointData PackModel(nlohmann::json header, const ParameterSet& params,
                         Adam* optimizer) {
  CheckpointData data;
  data.header = std::move(header);
  for (const auto& p : params.parameters())
    data.tensors.emplace_back("param/" + p.name, p.var.value());
  for (const auto& [name, m] : params.buffers())
    data.tensors.emplace_back("buffer/" + name, m);
  if (optimizer) {
    data.header["optimizer"] = {{"adam", optimizer->config()}, {"step", optimizer->step()}};
    const auto& list = params.parameters();
    for (std::size_t i = 0; i < list.size(); ++i) {
      data.tensors.emplace_back("adam.m/" + list[i].name, optimizer->first_moments()[i]);
      data.tensors.emplace_back("adam.v/" + list[i].name, optimizer->second_moments()[i]);
    }
  }
  return data;
}

void UnpackModel(const CheckpointData& data, ParameterSet& params, Adam* optimizer) {
  auto load = [&](const std::string& name, Mat& target) {
    const Mat* m = data.Find(name);
    if (!m) throw DataError("checkpoint is missing tensor " + name);
    if (m->rows() != target.rows() || m->cols() != target.cols())
      throw DataError("checkpoint tensor " + name + " has the wrong shape");
    target = *m;
  };
  const auto& list = params.parameters();
  for (const auto& p : list) {
    Var v = p.var;
    load("param/" + p.name, v.mutable_value());
  }
  for (auto& [name, m] : params.buffers()) load("buffer/" + name, m);
  if (optimizer && data.header.contains("optimizer")) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      load("adam.m/" + list[i].name, optimizer->first_moments()[i]);
      load("adam.v/" + list[i].name, optimizer->second_moments()[i]);
    }
    optimizer->set_step(data.header["optimizer"].value("step", 0));
  }
}

void CheckHeader(const CheckpointData& data, const std::string& kind,
                 const nlohmann::json& config) {
  const std::string found = data.header.value("kind", "");
  if (found != kind)
    throw DataError("checkpoint holds a '" + found + "' model, expected '" + kind + "'");
  if (data.header.value("config", nlohmann::json()) != config)
    throw DataError("checkpoint config does not match the requested " + kind + " config");
}

}  // namespace bgmtts::nn
