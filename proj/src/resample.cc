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
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "stitchvox/audio.h"
#include "stitchvox/util.h"

namespace stitchvox {

namespace {

constexpr int kTapsPerPhase = 32;
constexpr int kHalfTaps = kTapsPerPhase / 2;
constexpr double kKaiserBeta = 8.6;
// Ratios with more phases than this fall back to an oversampled kernel table
// with linear interpolation instead of one exact tap set per phase.
constexpr int64_t kMaxExactPhases = 4096;
constexpr int kKernelOversample = 1024;
constexpr int64_t kSpeedPrecision = int64_t{1} << 20;

double BesselI0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-14 * sum) break;
  }
  return sum;
}

// Windowed-sinc kernel evaluated at an offset of t input samples from the
// interpolation point. cutoff is relative to the input Nyquist frequency.
class SincKernel {
 public:
  explicit SincKernel(double cutoff)
      : cutoff_(cutoff), inv_i0_beta_(1.0 / BesselI0(kKaiserBeta)) {}

  double operator()(double t) const {
    const double r = t / kHalfTaps;
    if (r <= -1.0 || r >= 1.0) return 0.0;
    const double window =
        BesselI0(kKaiserBeta * std::sqrt(1.0 - r * r)) * inv_i0_beta_;
    const double x = std::numbers::pi * cutoff_ * t;
    const double sinc = (std::abs(x) < 1e-12) ? 1.0 : std::sin(x) / x;
    return cutoff_ * sinc * window;
  }

 private:
  double cutoff_;
  double inv_i0_beta_;
};

// Fills taps[j], j = 0..31, for input index i0 - 15 + j given the fractional
// position frac in [0, 1). Normalized to unit sum.
template <typename KernelFn>
void FillTaps(const KernelFn& kernel, double frac, double* taps) {
  double sum = 0.0;
  for (int j = 0; j < kTapsPerPhase; ++j) {
    taps[j] = kernel(static_cast<double>(j - (kHalfTaps - 1)) - frac);
    sum += taps[j];
  }
  for (int j = 0; j < kTapsPerPhase; ++j) taps[j] /= sum;
}

float Convolve(std::span<const float> in, int64_t i0, const double* taps) {
  const int64_t first = i0 - (kHalfTaps - 1);
  const int64_t len = static_cast<int64_t>(in.size());
  double acc = 0.0;
  if (first >= 0 && first + kTapsPerPhase <= len) {
    for (int j = 0; j < kTapsPerPhase; ++j) acc += taps[j] * in[first + j];
  } else {
    for (int j = 0; j < kTapsPerPhase; ++j) {
      const int64_t idx = first + j;
      if (idx >= 0 && idx < len) acc += taps[j] * in[idx];
    }
  }
  return static_cast<float>(acc);
}

// Output sample n sits at input position n * down / up.
std::vector<float> PolyphaseResample(std::span<const float> in, int64_t up,
                                     int64_t down, size_t out_len) {
  const int64_t g = std::gcd(up, down);
  up /= g;
  down /= g;
  const double cutoff = std::min(1.0, static_cast<double>(up) / down);
  const SincKernel kernel(cutoff);
  std::vector<float> out(out_len);

  if (up <= kMaxExactPhases) {
    std::vector<double> table(static_cast<size_t>(up) * kTapsPerPhase);
    for (int64_t p = 0; p < up; ++p) {
      FillTaps(kernel, static_cast<double>(p) / up, &table[p * kTapsPerPhase]);
    }
    for (size_t n = 0; n < out_len; ++n) {
      const int64_t pos = static_cast<int64_t>(n) * down;
      out[n] = Convolve(in, pos / up, &table[(pos % up) * kTapsPerPhase]);
    }
    return out;
  }

  // Oversampled kernel over [-kHalfTaps, kHalfTaps].
  const int table_size = 2 * kHalfTaps * kKernelOversample + 1;
  std::vector<double> fine(table_size + 1, 0.0);
  for (int i = 0; i < table_size; ++i) {
    fine[i] = kernel(static_cast<double>(i) / kKernelOversample - kHalfTaps);
  }
  auto interpolated = [&](double t) {
    const double x = (t + kHalfTaps) * kKernelOversample;
    if (x <= 0.0 || x >= table_size - 1) return 0.0;
    const int i = static_cast<int>(x);
    const double f = x - i;
    return fine[i] + (fine[i + 1] - fine[i]) * f;
  };
  double taps[kTapsPerPhase];
  for (size_t n = 0; n < out_len; ++n) {
    const int64_t pos = static_cast<int64_t>(n) * down;
    FillTaps(interpolated, static_cast<double>(pos % up) / up, taps);
    out[n] = Convolve(in, pos / up, taps);
  }
  return out;
}

}  // namespace

PcmBuffer Resample(const PcmBuffer& buf, int target_rate_hz) {
  if (target_rate_hz <= 0) {
    throw InvalidArgument("target sample rate must be positive");
  }
  const int source = buf.sample_rate_hz();
  if (target_rate_hz == source) return buf;
  const int64_t g = std::gcd<int64_t>(source, target_rate_hz);
  const int64_t up = target_rate_hz / g;
  const int64_t down = source / g;
  const int64_t len = static_cast<int64_t>(buf.size());
  const size_t out_len = static_cast<size_t>((len * up + down / 2) / down);
  return PcmBuffer(PolyphaseResample(buf.samples(), up, down, out_len),
                   target_rate_hz);
}

PcmBuffer ApplySpeed(const PcmBuffer& buf, double factor) {
  if (!(factor >= kMinEffectFactor && factor <= kMaxEffectFactor)) {
    throw InvalidArgument("speed factor must be in [0.5, 2.0], got " +
                          std::to_string(factor));
  }
  if (factor == 1.0) return buf;
  const int64_t down = std::llround(factor * kSpeedPrecision);
  const size_t out_len = static_cast<size_t>(
      std::llround(static_cast<double>(buf.size()) / factor));
  return PcmBuffer(
      PolyphaseResample(buf.samples(), kSpeedPrecision, down, out_len),
      buf.sample_rate_hz());
}

}  // namespace stitchvox
