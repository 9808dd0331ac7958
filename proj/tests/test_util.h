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

#ifndef STITCHVOX_TESTS_TEST_UTIL_H_
#define STITCHVOX_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stitchvox/audio.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox::test {

// Deletes the directory on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "stitchvox-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const {
    return path_ / rel;
  }

 private:
  std::filesystem::path path_;
};

inline PcmBuffer Sine(double freq_hz, size_t n, int rate, double amp = 0.5) {
  std::vector<float> s(n);
  for (size_t i = 0; i < n; ++i) {
    s[i] = static_cast<float>(
        amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / rate));
  }
  return PcmBuffer(std::move(s), rate);
}

inline PcmBuffer Constant(float value, size_t n, int rate) {
  return PcmBuffer(std::vector<float>(n, value), rate);
}

// Frequency (Hz) of the strongest DFT bin above DC, found by evaluating
// every bin with the Goertzel recurrence.
inline double DominantFrequency(const PcmBuffer& buf) {
  const auto& x = buf.samples();
  const size_t n = x.size();
  double best_power = -1.0;
  size_t best_bin = 0;
  for (size_t k = 1; k <= n / 2; ++k) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    const double coeff = 2.0 * std::cos(w);
    double s1 = 0.0, s2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double s0 = x[i] + coeff * s1 - s2;
      s2 = s1;
      s1 = s0;
    }
    const double power = s1 * s1 + s2 * s2 - coeff * s1 * s2;
    if (power > best_power) {
      best_power = power;
      best_bin = k;
    }
  }
  return static_cast<double>(best_bin) * buf.sample_rate_hz() / n;
}

inline PcmBuffer RandomBuffer(std::mt19937_64& gen, size_t n, int rate) {
  std::uniform_real_distribution<float> dist(-1.2f, 1.2f);
  std::vector<float> s(n);
  for (auto& v : s) v = dist(gen);
  return PcmBuffer(std::move(s), rate);
}

// In-memory bank built with the mock TTS: every speaker gets every word.
inline SpokenVocabBank MockBank(const std::vector<std::string>& words,
                                const std::vector<std::string>& speakers) {
  SpokenVocabBank::SnippetMap map;
  for (const auto& s : speakers) {
    for (const auto& w : words) map[s].emplace(w, MockTtsRender(w, s));
  }
  return SpokenVocabBank::FromSnippets(std::move(map));
}

// Writes mock-rendered snippets as <dir>/<speaker>/<word>.wav.
inline void WriteSnippetTree(const std::filesystem::path& dir,
                             const std::vector<std::string>& words,
                             const std::vector<std::string>& speakers) {
  for (const auto& s : speakers) {
    std::filesystem::create_directories(dir / s);
    for (const auto& w : words) {
      WriteWav(MockTtsRender(w, s), dir / s / (w + ".wav"));
    }
  }
}

}  // namespace stitchvox::test

#endif  // STITCHVOX_TESTS_TEST_UTIL_H_
