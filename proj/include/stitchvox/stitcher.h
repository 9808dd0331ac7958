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

#ifndef STITCHVOX_STITCHER_H_
#define STITCHVOX_STITCHER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stitchvox/audio.h"
#include "stitchvox/matcher.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox {

inline constexpr double kDefaultFadeMs = 10.0;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct DistortRanges {
  Range tempo{0.9, 1.1};
  Range speed{0.95, 1.05};
  Range echo_delay_ms{50.0, 150.0};
  Range echo_decay{0.2, 0.4};
};

struct StitchConfig {
  double fade_ms = kDefaultFadeMs;
  // 0 means "the bank rate".
  int output_rate_hz = 0;
  bool distort = false;
  DistortRanges distort_ranges;
  std::string filler{kDefaultFiller};
  MatchOptions match;
  // Spell out digit-only tokens before lookup. Off by default.
  bool expand_numbers = false;
  // Draw a speaker per token instead of per utterance. Only meaningful with
  // a random speaker policy.
  bool mix_speakers_per_token = false;

  // Throws InvalidArgument on empty ranges or a negative fade.
  void Validate() const;
};

// Either a fixed speaker or a uniform draw per utterance.
class SpeakerPolicy {
 public:
  static SpeakerPolicy Fixed(std::string speaker_id) {
    return SpeakerPolicy(std::move(speaker_id));
  }
  static SpeakerPolicy UniformRandom() { return SpeakerPolicy(); }

  bool is_fixed() const { return fixed_.has_value(); }
  const std::string& fixed_speaker() const { return *fixed_; }

 private:
  SpeakerPolicy() = default;
  explicit SpeakerPolicy(std::string id) : fixed_(std::move(id)) {}
  std::optional<std::string> fixed_;
};

struct TokenReport {
  std::string raw;
  std::string token;  // normalized query
  Resolution resolution;
  std::string speaker_id;
  std::string language;  // empty for monolingual stitching
  size_t num_samples = 0;

  friend bool operator==(const TokenReport&, const TokenReport&) = default;
};

struct DistortionParams {
  double tempo = 1.0;
  double speed = 1.0;
  double echo_delay_ms = 0.0;
  double echo_decay = 0.0;

  friend bool operator==(const DistortionParams&,
                         const DistortionParams&) = default;
};

struct StitchReport {
  std::string speaker_id;
  std::vector<TokenReport> tokens;
  size_t exact = 0;
  size_t fuzzy = 0;
  size_t fallback = 0;
  std::optional<DistortionParams> distortion;
  size_t num_samples = 0;
  int sample_rate_hz = 0;

  friend bool operator==(const StitchReport&, const StitchReport&) = default;
};

std::string StitchReportToJson(const StitchReport& report);

struct StitchResult {
  PcmBuffer audio;
  StitchReport report;
};

// Seed sub-streams. Every random decision of an utterance draws from its own
// stream so that adding one kind of draw never shifts another.
enum class SeedStream : uint64_t {
  kSpeaker = 1,
  kTempo = 2,
  kSpeed = 3,
  kEcho = 4,
  kTokenSpeaker = 5,
  kCodeSwitch = 6,
};

uint64_t StreamSeed(uint64_t seed, SeedStream stream);

// Splits on whitespace and normalizes; dropped tokens are omitted. Each
// returned pair is (raw, normalized).
std::vector<std::pair<std::string, std::string>> TokenizeSentence(
    std::string_view sentence, bool expand_numbers = false);

// Chooses the utterance speaker. For UniformRandom the draw comes from the
// kSpeaker stream of `seed`.
std::string ChooseSpeaker(const SpokenVocabBank& bank,
                          const SpeakerPolicy& policy, uint64_t seed);

// Left-folds the pieces with CrossfadeConcat, applies the seeded distortion
// chain (tempo, speed, echo) if enabled, and resamples last when the output
// rate differs from `rate`. Fills the distortion field of *report.
PcmBuffer RenderUtterance(std::span<const PcmBuffer* const> pieces, int rate,
                          const StitchConfig& cfg, uint64_t seed,
                          StitchReport* report);

// Sentence -> one synthetic utterance from a single speaker.
StitchResult StitchSentence(std::string_view sentence,
                            const SpokenVocabBank& bank,
                            const SpeakerPolicy& policy,
                            const StitchConfig& cfg, uint64_t seed);

}  // namespace stitchvox

#endif  // STITCHVOX_STITCHER_H_
