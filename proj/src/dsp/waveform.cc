// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/waveform.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "bgmtts/base/error.h"

namespace bgmtts::dsp {

void Waveform::Validate() const {
  if (sample_rate <= 0)
    throw ArgumentError("sample rate must be positive, got " +
                        std::to_string(sample_rate));
  for (double s : samples)
    if (!std::isfinite(s)) throw ArgumentError("waveform has non-finite samples");
}

namespace {

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string* out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open audio file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  auto fail = [&](const std::string& why) -> DataError {
    return DataError(path.string() + ": " + why);
  };
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");

  bool have_fmt = false;
  int channels = 0, bits = 0, rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const std::uint32_t chunk = ReadU32(data + pos + 4);
    const unsigned char* body = data + pos + 8;
    if (pos + 8 + chunk > size) throw fail("truncated chunk");
    if (std::memcmp(data + pos, "fmt ", 4) == 0) {
      if (chunk < 16) throw fail("short fmt chunk");
      const int format = ReadU16(body);
      channels = ReadU16(body + 2);
      rate = static_cast<int>(ReadU32(body + 4));
      bits = ReadU16(body + 14);
      if (format != 1) throw fail("only PCM audio is supported");
      have_fmt = true;
    } else if (std::memcmp(data + pos, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk before fmt chunk");
      if (channels != 1) throw fail("only mono audio is supported");
      if (bits != 16) throw fail("only 16-bit PCM is supported");
      Waveform wave;
      wave.sample_rate = rate;
      wave.samples.resize(chunk / 2);
      for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(body + 2 * i));
        wave.samples[i] = v / 32768.0;
      }
      return wave;
    }
    pos += 8 + chunk + (chunk & 1);
  }
  throw fail("no data chunk");
}

Waveform ReadWav(const std::filesystem::path& path, int expected_rate) {
  Waveform wave = ReadWav(path);
  if (wave.sample_rate != expected_rate)
    throw DataError(path.string() + ": sample rate " +
                    std::to_string(wave.sample_rate) + " Hz, expected " +
                    std::to_string(expected_rate) + " Hz");
  return wave;
}

void WriteWav(const std::filesystem::path& path, const Waveform& wave) {
  wave.Validate();
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  PutU32(&out, 36 + 2 * n);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, 1);
  PutU32(&out, static_cast<std::uint32_t>(wave.sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, 2 * n);
  for (double s : wave.samples) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(
        std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L));
    PutU16(&out, static_cast<std::uint16_t>(v));
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write audio file " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace bgmtts::dsp
