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

#include "stitchvox/stitcher.h"

#include <memory>

#include "json.hpp"
#include "stitchvox/util.h"

namespace stitchvox {

namespace {

void CheckRange(const Range& r, std::string_view name) {
  if (!(r.lo <= r.hi)) {
    throw InvalidArgument("empty distortion range for " + std::string(name));
  }
}

// In-place equivalent of acc = CrossfadeConcat(acc, next, fade_ms).
void AppendCrossfaded(std::vector<float>& acc, const std::vector<float>& next,
                      double fade_ms, int rate) {
  const size_t fade_n = CrossfadeLength(acc.size(), next.size(), fade_ms, rate);
  const size_t tail = acc.size() - fade_n;
  for (size_t i = 0; i < fade_n; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(fade_n + 1);
    acc[tail + i] = static_cast<float>(acc[tail + i] * (1.0 - t) + next[i] * t);
  }
  acc.insert(acc.end(), next.begin() + static_cast<ptrdiff_t>(fade_n),
             next.end());
}

}  // namespace

void StitchConfig::Validate() const {
  if (!(fade_ms >= 0.0)) throw InvalidArgument("fade_ms must be >= 0");
  if (output_rate_hz < 0) throw InvalidArgument("output rate must be positive");
  if (filler.empty()) throw InvalidArgument("filler word must be non-empty");
  CheckRange(distort_ranges.tempo, "tempo");
  CheckRange(distort_ranges.speed, "speed");
  CheckRange(distort_ranges.echo_delay_ms, "echo delay");
  CheckRange(distort_ranges.echo_decay, "echo decay");
}

uint64_t StreamSeed(uint64_t seed, SeedStream stream) {
  return DeriveSeed(seed, static_cast<uint64_t>(stream));
}

std::vector<std::pair<std::string, std::string>> TokenizeSentence(
    std::string_view sentence, bool expand_numbers) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& raw : SplitWhitespace(sentence)) {
    std::string token = NormalizeToken(raw);
    if (token.empty()) continue;
    if (expand_numbers) {
      auto words = NumberToWords(token);
      if (!words.empty()) {
        for (auto& w : words) out.emplace_back(raw, std::move(w));
        continue;
      }
    }
    out.emplace_back(std::move(raw), std::move(token));
  }
  return out;
}

std::string ChooseSpeaker(const SpokenVocabBank& bank,
                          const SpeakerPolicy& policy, uint64_t seed) {
  if (policy.is_fixed()) {
    if (!bank.HasSpeaker(policy.fixed_speaker())) {
      throw InvalidArgument("unknown speaker '" + policy.fixed_speaker() + "'");
    }
    return policy.fixed_speaker();
  }
  Rng rng(StreamSeed(seed, SeedStream::kSpeaker));
  return bank.speakers()[rng.UniformIndex(bank.speakers().size())];
}

PcmBuffer RenderUtterance(std::span<const PcmBuffer* const> pieces, int rate,
                          const StitchConfig& cfg, uint64_t seed,
                          StitchReport* report) {
  if (pieces.empty()) throw InvalidArgument("nothing to stitch");
  size_t total = 0;
  for (const PcmBuffer* p : pieces) {
    if (p->sample_rate_hz() != rate) {
      throw InvalidArgument("snippet rate " +
                            std::to_string(p->sample_rate_hz()) +
                            " does not match " + std::to_string(rate));
    }
    total += p->size();
  }
  std::vector<float> acc;
  acc.reserve(total);
  acc = pieces.front()->samples();
  for (size_t i = 1; i < pieces.size(); ++i) {
    AppendCrossfaded(acc, pieces[i]->samples(), cfg.fade_ms, rate);
  }
  PcmBuffer out(std::move(acc), rate);

  if (cfg.distort) {
    const DistortRanges& r = cfg.distort_ranges;
    DistortionParams params;
    params.tempo = Rng(StreamSeed(seed, SeedStream::kTempo))
                       .Uniform(r.tempo.lo, r.tempo.hi);
    params.speed = Rng(StreamSeed(seed, SeedStream::kSpeed))
                       .Uniform(r.speed.lo, r.speed.hi);
    Rng echo(StreamSeed(seed, SeedStream::kEcho));
    params.echo_delay_ms = echo.Uniform(r.echo_delay_ms.lo, r.echo_delay_ms.hi);
    params.echo_decay = echo.Uniform(r.echo_decay.lo, r.echo_decay.hi);
    out = ApplyTempo(out, params.tempo);
    out = ApplySpeed(out, params.speed);
    out = ApplyEcho(out, params.echo_delay_ms, params.echo_decay);
    if (report) report->distortion = params;
  }
  if (cfg.output_rate_hz > 0 && cfg.output_rate_hz != rate) {
    out = Resample(out, cfg.output_rate_hz);
  }
  if (report) {
    report->num_samples = out.size();
    report->sample_rate_hz = out.sample_rate_hz();
  }
  return out;
}

StitchResult StitchSentence(std::string_view sentence,
                            const SpokenVocabBank& bank,
                            const SpeakerPolicy& policy,
                            const StitchConfig& cfg, uint64_t seed) {
  cfg.Validate();
  const auto tokens = TokenizeSentence(sentence, cfg.expand_numbers);
  if (tokens.empty()) throw InvalidArgument("no stitchable tokens");

  StitchReport report;
  report.speaker_id = ChooseSpeaker(bank, policy, seed);

  std::unique_ptr<Matcher> custom;
  const Matcher* matcher = &bank.matcher();
  if (!(cfg.match == matcher->options())) {
    custom = std::make_unique<Matcher>(bank.vocab(), cfg.match);
    matcher = custom.get();
  }

  const bool per_token = cfg.mix_speakers_per_token && !policy.is_fixed();
  Rng token_rng(StreamSeed(seed, SeedStream::kTokenSpeaker));

  std::vector<const PcmBuffer*> pieces;
  pieces.reserve(tokens.size());
  for (const auto& [raw, token] : tokens) {
    TokenReport tr;
    tr.raw = raw;
    tr.token = token;
    tr.resolution = matcher->Resolve(token, cfg.filler);
    tr.speaker_id =
        per_token ? bank.speakers()[token_rng.UniformIndex(bank.speakers().size())]
                  : report.speaker_id;
    const PcmBuffer* snippet =
        bank.GetSnippet(tr.speaker_id, tr.resolution.matched_word);
    if (snippet == nullptr) {
      throw Error("internal: resolved word '" + tr.resolution.matched_word +
                  "' missing from bank");
    }
    tr.num_samples = snippet->size();
    switch (tr.resolution.kind) {
      case MatchKind::kExact: ++report.exact; break;
      case MatchKind::kFuzzy: ++report.fuzzy; break;
      case MatchKind::kFallback: ++report.fallback; break;
    }
    pieces.push_back(snippet);
    report.tokens.push_back(std::move(tr));
  }

  PcmBuffer audio =
      RenderUtterance(pieces, bank.sample_rate_hz(), cfg, seed, &report);
  return {std::move(audio), std::move(report)};
}

std::string StitchReportToJson(const StitchReport& report) {
  nlohmann::ordered_json j;
  j["speaker_id"] = report.speaker_id;
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& t : report.tokens) {
    nlohmann::ordered_json tj;
    tj["raw"] = t.raw;
    tj["token"] = t.token;
    tj["kind"] = MatchKindName(t.resolution.kind);
    tj["matched_word"] = t.resolution.matched_word;
    tj["similarity"] = t.resolution.similarity;
    tj["speaker_id"] = t.speaker_id;
    if (!t.language.empty()) tj["language"] = t.language;
    tj["num_samples"] = t.num_samples;
    tokens.push_back(std::move(tj));
  }
  j["tokens"] = std::move(tokens);
  j["counts"] = {{"exact", report.exact},
                 {"fuzzy", report.fuzzy},
                 {"fallback", report.fallback}};
  if (report.distortion) {
    const auto& d = *report.distortion;
    j["distortion"] = {{"tempo", d.tempo},
                       {"speed", d.speed},
                       {"echo_delay_ms", d.echo_delay_ms},
                       {"echo_decay", d.echo_decay}};
  } else {
    j["distortion"] = nullptr;
  }
  j["num_samples"] = report.num_samples;
  j["sample_rate_hz"] = report.sample_rate_hz;
  return j.dump(-1, ' ', /*ensure_ascii=*/true);
}

}  // namespace stitchvox
