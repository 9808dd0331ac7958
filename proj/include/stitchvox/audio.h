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

#ifndef STITCHVOX_AUDIO_H_
#define STITCHVOX_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stitchvox {

inline constexpr int kDefaultSampleRate = 24000;

// Mono float PCM. Samples are nominally in [-1, 1]; the rate is always
// positive and every sample is finite. Construction enforces both.
class PcmBuffer {
 public:
  PcmBuffer() = default;
  PcmBuffer(std::vector<float> samples, int sample_rate_hz);

  const std::vector<float>& samples() const { return samples_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  // Moves the sample vector out, leaving the buffer empty.
  std::vector<float> release() && { return std::move(samples_); }

  friend bool operator==(const PcmBuffer&, const PcmBuffer&) = default;

 private:
  std::vector<float> samples_;
  int sample_rate_hz_ = kDefaultSampleRate;
};

// ---------------------------------------------------------------------------
// WAV codec
//
// Reading accepts RIFF/WAVE with fmt format 1 (16-bit PCM) or 3 (32-bit
// float), any channel count; channels are averaged into mono. PCM16 values
// are scaled by 1/32768. Writing always emits mono PCM16 with
// q(s) = clamp(round_half_away(s * 32767), -32768, 32767).
// ---------------------------------------------------------------------------

int16_t QuantizeSample(float s);

PcmBuffer DecodeWav(std::string_view bytes);
std::string EncodeWav(const PcmBuffer& buf);

PcmBuffer ReadWav(const std::filesystem::path& path);
void WriteWav(const PcmBuffer& buf, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

// Band-limited rational-ratio resampler: polyphase windowed sinc, Kaiser
// window (beta 8.6), 32 taps per phase, each phase normalized to unit DC
// gain. Output length is round(len * target / source).
PcmBuffer Resample(const PcmBuffer& buf, int target_rate_hz);

// ---------------------------------------------------------------------------
// Concatenation and effects
// ---------------------------------------------------------------------------

// Number of overlapping samples used when cross-fading a and b.
size_t CrossfadeLength(size_t len_a, size_t len_b, double fade_ms,
                       int sample_rate_hz);

// Linear cross-fade. The overlap has fade_n samples; sample i of the overlap
// is a * (1 - t) + b * t with t = (i + 1) / (fade_n + 1).
PcmBuffer CrossfadeConcat(const PcmBuffer& a, const PcmBuffer& b,
                          double fade_ms);

inline constexpr double kMinEffectFactor = 0.5;
inline constexpr double kMaxEffectFactor = 2.0;

// Time stretch without pitch change (WSOLA, 25 ms frames, 50% overlap,
// +-5 ms similarity search). factor > 1 shortens. Output length is exactly
// round(len / factor).
PcmBuffer ApplyTempo(const PcmBuffer& buf, double factor);

// Playback-rate change: resample by 1/factor and keep the original rate
// label, so pitch scales by factor. Output length is round(len / factor).
PcmBuffer ApplySpeed(const PcmBuffer& buf, double factor);

// Single feed-forward tap: y[t] = x[t] + decay * x[t - d], clamped to
// [-1, 1]. Output is d samples longer than the input.
PcmBuffer ApplyEcho(const PcmBuffer& buf, double delay_ms, double decay);

}  // namespace stitchvox

#endif  // STITCHVOX_AUDIO_H_
