// Copyright 2026 The StitchVox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstring>
#include <string>

#include "stitchvox/audio.h"
#include "stitchvox/util.h"

namespace stitchvox {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

uint16_t ReadU16(std::string_view b, size_t off) {
  return static_cast<uint16_t>(static_cast<unsigned char>(b[off]) |
                               (static_cast<unsigned char>(b[off + 1]) << 8));
}

uint32_t ReadU32(std::string_view b, size_t off) {
  return static_cast<uint32_t>(static_cast<unsigned char>(b[off])) |
         (static_cast<uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8) |
         (static_cast<uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16) |
         (static_cast<uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24);
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t block_align = 0;
  uint16_t bits = 0;
};

}  // namespace

PcmBuffer::PcmBuffer(std::vector<float> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw InvalidArgument("sample rate must be positive, got " +
                          std::to_string(sample_rate_hz_));
  }
  for (size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidArgument("non-finite sample at index " + std::to_string(i));
    }
  }
}

int16_t QuantizeSample(float s) {
  // std::round rounds halfway cases away from zero.
  const double q = std::round(static_cast<double>(s) * 32767.0);
  if (q > 32767.0) return 32767;
  if (q < -32768.0) return -32768;
  return static_cast<int16_t>(q);
}

PcmBuffer DecodeWav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    throw Error("malformed WAV header: missing RIFF/WAVE tag");
  }
  FmtChunk fmt;
  bool have_fmt = false;
  std::string_view data;
  bool have_data = false;
  size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(off, 4);
    const uint32_t size = ReadU32(bytes, off + 4);
    const size_t body = off + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > bytes.size()) {
        throw Error("malformed WAV header: short fmt chunk");
      }
      fmt.format = ReadU16(bytes, body);
      fmt.channels = ReadU16(bytes, body + 2);
      fmt.sample_rate = ReadU32(bytes, body + 4);
      fmt.block_align = ReadU16(bytes, body + 12);
      fmt.bits = ReadU16(bytes, body + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw Error("malformed WAV header: short extensible fmt");
        fmt.format = ReadU16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (body + size > bytes.size()) {
        throw Error("malformed WAV: data chunk truncated");
      }
      data = bytes.substr(body, size);
      have_data = true;
      break;
    }
    off = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error("malformed WAV header: no fmt chunk");
  if (!have_data) throw Error("malformed WAV: no data chunk");
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw Error("malformed WAV header: zero channels or sample rate");
  }

  size_t bytes_per_sample = 0;
  if (fmt.format == kFormatPcm && fmt.bits == 16) {
    bytes_per_sample = 2;
  } else if (fmt.format == kFormatFloat && fmt.bits == 32) {
    bytes_per_sample = 4;
  } else {
    throw Error("unsupported WAV codec: format " + std::to_string(fmt.format) +
                ", " + std::to_string(fmt.bits) + "-bit");
  }
  const size_t frame_bytes = bytes_per_sample * fmt.channels;
  const size_t frames = data.size() / frame_bytes;
  std::vector<float> samples(frames);
  for (size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (size_t c = 0; c < fmt.channels; ++c) {
      const size_t at = f * frame_bytes + c * bytes_per_sample;
      if (bytes_per_sample == 2) {
        acc += static_cast<int16_t>(ReadU16(data, at)) / 32768.0;
      } else {
        const uint32_t bits = ReadU32(data, at);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        acc += v;
      }
    }
    samples[f] = static_cast<float>(acc / fmt.channels);
  }
  return PcmBuffer(std::move(samples), static_cast<int>(fmt.sample_rate));
}

std::string EncodeWav(const PcmBuffer& buf) {
  const uint32_t data_bytes = static_cast<uint32_t>(buf.size() * 2);
  const uint32_t rate = static_cast<uint32_t>(buf.sample_rate_hz());
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);           // channels
  PutU32(out, rate);
  PutU32(out, rate * 2);    // byte rate
  PutU16(out, 2);           // block align
  PutU16(out, 16);          // bits per sample
  out += "data";
  PutU32(out, data_bytes);
  for (float s : buf.samples()) {
    PutU16(out, static_cast<uint16_t>(QuantizeSample(s)));
  }
  return out;
}

PcmBuffer ReadWav(const std::filesystem::path& path) {
  try {
    return DecodeWav(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void WriteWav(const PcmBuffer& buf, const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeWav(buf));
}

}  // namespace stitchvox
