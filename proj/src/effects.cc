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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stitchvox/audio.h"
#include "stitchvox/util.h"

namespace stitchvox {

size_t CrossfadeLength(size_t len_a, size_t len_b, double fade_ms,
                       int sample_rate_hz) {
  if (!(fade_ms >= 0.0)) throw InvalidArgument("fade_ms must be >= 0");
  const auto n = static_cast<size_t>(
      std::llround(fade_ms * sample_rate_hz / 1000.0));
  return std::min({n, len_a, len_b});
}

PcmBuffer CrossfadeConcat(const PcmBuffer& a, const PcmBuffer& b,
                          double fade_ms) {
  if (a.sample_rate_hz() != b.sample_rate_hz()) {
    throw InvalidArgument("crossfade: sample rate mismatch (" +
                          std::to_string(a.sample_rate_hz()) + " vs " +
                          std::to_string(b.sample_rate_hz()) + ")");
  }
  const size_t fade_n =
      CrossfadeLength(a.size(), b.size(), fade_ms, a.sample_rate_hz());
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  std::vector<float> out;
  out.reserve(sa.size() + sb.size() - fade_n);
  out.insert(out.end(), sa.begin(), sa.end() - static_cast<ptrdiff_t>(fade_n));
  const size_t a_tail = sa.size() - fade_n;
  for (size_t i = 0; i < fade_n; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(fade_n + 1);
    out.push_back(static_cast<float>(sa[a_tail + i] * (1.0 - t) + sb[i] * t));
  }
  out.insert(out.end(), sb.begin() + static_cast<ptrdiff_t>(fade_n), sb.end());
  return PcmBuffer(std::move(out), a.sample_rate_hz());
}

PcmBuffer ApplyTempo(const PcmBuffer& buf, double factor) {
  if (!(factor >= kMinEffectFactor && factor <= kMaxEffectFactor)) {
    throw InvalidArgument("tempo factor must be in [0.5, 2.0], got " +
                          std::to_string(factor));
  }
  if (factor == 1.0) return buf;

  const int sr = buf.sample_rate_hz();
  const auto& in = buf.samples();
  const int64_t in_len = static_cast<int64_t>(in.size());
  const int64_t out_len = std::llround(static_cast<double>(in_len) / factor);
  if (out_len == 0) return PcmBuffer({}, sr);

  int64_t frame = std::max<int64_t>(2, std::llround(0.025 * sr));
  frame += frame & 1;
  const int64_t hop = frame / 2;
  const int64_t seek = std::llround(0.005 * sr);

  // Half-sample-offset Hann: strictly positive, and two copies at 50% overlap
  // sum to exactly one.
  std::vector<double> window(static_cast<size_t>(frame));
  for (int64_t i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 0.5) / frame);
  }
  auto at = [&](int64_t i) -> double {
    return (i >= 0 && i < in_len) ? in[i] : 0.0;
  };

  std::vector<double> acc(static_cast<size_t>(out_len + frame), 0.0);
  std::vector<double> wsum(acc.size(), 0.0);
  int64_t prev = 0;
  for (int64_t k = 0; k * hop < out_len; ++k) {
    const int64_t out_pos = k * hop;
    int64_t pos = 0;
    if (k > 0) {
      // Pick the candidate near the nominal analysis position whose overlap
      // region best matches the natural continuation of the previous frame.
      const int64_t nominal = std::llround(static_cast<double>(out_pos) * factor);
      const int64_t natural = prev + hop;
      double best = -2.0;
      pos = std::max<int64_t>(0, nominal);
      for (int64_t d = -seek; d <= seek; ++d) {
        const int64_t cand = nominal + d;
        if (cand < 0) continue;
        double dot = 0.0, energy = 0.0, ref_energy = 0.0;
        for (int64_t i = 0; i < hop; ++i) {
          const double c = at(cand + i);
          const double r = at(natural + i);
          dot += c * r;
          energy += c * c;
          ref_energy += r * r;
        }
        const double denom = std::sqrt(energy * ref_energy);
        const double score = denom > 1e-12 ? dot / denom : 0.0;
        if (score > best) {
          best = score;
          pos = cand;
        }
      }
    }
    for (int64_t i = 0; i < frame; ++i) {
      acc[out_pos + i] += at(pos + i) * window[i];
      wsum[out_pos + i] += window[i];
    }
    prev = pos;
  }

  std::vector<float> out(static_cast<size_t>(out_len));
  for (int64_t i = 0; i < out_len; ++i) {
    out[i] = wsum[i] > 1e-9 ? static_cast<float>(acc[i] / wsum[i]) : 0.0f;
  }
  return PcmBuffer(std::move(out), sr);
}

PcmBuffer ApplyEcho(const PcmBuffer& buf, double delay_ms, double decay) {
  if (!(delay_ms > 0.0)) throw InvalidArgument("echo delay must be positive");
  if (!(decay >= 0.0 && decay < 1.0)) {
    throw InvalidArgument("echo decay must be in [0, 1)");
  }
  const int64_t d = std::llround(delay_ms * buf.sample_rate_hz() / 1000.0);
  if (d < 1) throw InvalidArgument("echo delay is shorter than one sample");
  const auto& x = buf.samples();
  const size_t len = x.size();
  std::vector<float> y(len + static_cast<size_t>(d), 0.0f);
  for (size_t t = 0; t < y.size(); ++t) {
    double v = t < len ? x[t] : 0.0;
    if (t >= static_cast<size_t>(d)) v += decay * x[t - d];
    y[t] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return PcmBuffer(std::move(y), buf.sample_rate_hz());
}

}  // namespace stitchvox
