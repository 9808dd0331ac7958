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

#include "stitchvox/code_switch.h"

#include <algorithm>
#include <memory>
#include <sstream>

#include "stitchvox/util.h"

namespace stitchvox {

CsDictionary CsDictionary::LoadTsv(const std::filesystem::path& path,
                                   std::string source_lang,
                                   std::string target_lang) {
  CsDictionary dict(std::move(source_lang), std::move(target_lang));
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitChar(line, '\t');
    if (fields.size() < 2 || NormalizeToken(fields[0]).empty() ||
        NormalizeToken(fields[1]).empty()) {
      throw Error(path.string() + ":" + std::to_string(line_no) +
                  ": expected source<TAB>target");
    }
    dict.Add(fields[0], fields[1]);
  }
  return dict;
}

bool CsDictionary::Add(std::string_view source, std::string_view target) {
  std::string key = NormalizeToken(source);
  std::string value = NormalizeToken(target);
  if (key.empty() || value.empty()) {
    throw InvalidArgument("dictionary entries must be non-empty");
  }
  return entries_.emplace(std::move(key), std::move(value)).second;
}

const std::string* CsDictionary::Lookup(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void CsConfig::Validate() const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("code-switch probability must be in [0, 1]");
  }
}

CodeSwitchResult CodeSwitchTokens(std::span<const std::string> tokens,
                                  const CsDictionary& dict,
                                  const CsConfig& cfg, uint64_t seed) {
  cfg.Validate();
  CodeSwitchResult result;
  result.tokens.reserve(tokens.size());
  for (const auto& t : tokens) result.tokens.push_back({t, false});

  Rng rng(StreamSeed(seed, SeedStream::kCodeSwitch));
  CsReport& report = result.report;
  if (cfg.literal_normal_draw) {
    report.draw = rng.NextGaussian();
    report.switched = report.draw > cfg.p;
  } else {
    report.draw = rng.NextDouble();
    report.switched = report.draw < cfg.p;
  }
  if (!report.switched) return result;

  const size_t k = std::min(cfg.n, tokens.size());
  std::vector<size_t> positions(tokens.size());
  for (size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + rng.UniformIndex(positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  report.selected_indices.assign(positions.begin(), positions.begin() + k);
  std::sort(report.selected_indices.begin(), report.selected_indices.end());

  for (size_t idx : report.selected_indices) {
    if (const std::string* target = dict.Lookup(tokens[idx])) {
      result.tokens[idx] = {*target, true};
      report.replaced_indices.push_back(idx);
    }
  }
  return result;
}

CsStitcher::CsStitcher(const SpokenVocabBank& source,
                       const SpokenVocabBank& target, const CsDictionary& dict)
    : source_(&source), target_(&target), dict_(&dict) {
  if (source.sample_rate_hz() != target.sample_rate_hz()) {
    throw InvalidArgument(
        "source and target banks differ in sample rate (" +
        std::to_string(source.sample_rate_hz()) + " vs " +
        std::to_string(target.sample_rate_hz()) + ")");
  }
  const Matcher& target_words = target.matcher();
  std::vector<std::string> missing;
  for (const auto& [key, value] : dict.entries()) {
    if (!target_words.Contains(value)) missing.push_back(value);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string list;
    for (size_t i = 0; i < missing.size() && i < 20; ++i) {
      list += (i ? ", " : "") + missing[i];
    }
    throw InvalidArgument(std::to_string(missing.size()) +
                          " dictionary value(s) missing from the target bank: " +
                          list);
  }
}

CsStitchResult CsStitcher::Stitch(std::string_view sentence,
                                  const CsConfig& cs_cfg,
                                  const StitchConfig& stitch_cfg,
                                  const SpeakerPolicy& policy,
                                  uint64_t seed) const {
  stitch_cfg.Validate();
  const auto raw_tokens = TokenizeSentence(sentence, stitch_cfg.expand_numbers);
  if (raw_tokens.empty()) throw InvalidArgument("no stitchable tokens");
  std::vector<std::string> tokens;
  tokens.reserve(raw_tokens.size());
  for (const auto& rt : raw_tokens) tokens.push_back(rt.second);

  CodeSwitchResult switched = CodeSwitchTokens(tokens, *dict_, cs_cfg, seed);

  StitchReport report;
  report.speaker_id = ChooseSpeaker(*source_, policy, seed);
  std::string target_speaker;
  if (policy.is_fixed() && target_->HasSpeaker(policy.fixed_speaker())) {
    target_speaker = policy.fixed_speaker();
  } else {
    Rng rng(DeriveSeed(StreamSeed(seed, SeedStream::kSpeaker), 1));
    target_speaker = target_->speakers()[rng.UniformIndex(target_->speakers().size())];
  }

  std::unique_ptr<Matcher> custom;
  const Matcher* matcher = &source_->matcher();
  if (!(stitch_cfg.match == matcher->options())) {
    custom = std::make_unique<Matcher>(source_->vocab(), stitch_cfg.match);
    matcher = custom.get();
  }

  std::vector<const PcmBuffer*> pieces;
  for (size_t i = 0; i < switched.tokens.size(); ++i) {
    const TaggedToken& tt = switched.tokens[i];
    TokenReport tr;
    tr.raw = raw_tokens[i].first;
    tr.token = tt.text;
    const PcmBuffer* snippet = nullptr;
    if (tt.is_target) {
      tr.resolution = {MatchKind::kExact, tt.text, 1.0, 0};
      tr.speaker_id = target_speaker;
      tr.language = dict_->target_lang();
      snippet = target_->GetSnippet(target_speaker, tt.text);
    } else {
      tr.resolution = matcher->Resolve(tt.text, stitch_cfg.filler);
      tr.speaker_id = report.speaker_id;
      tr.language = dict_->source_lang();
      snippet = source_->GetSnippet(report.speaker_id, tr.resolution.matched_word);
    }
    if (snippet == nullptr) {
      throw Error("internal: no snippet for '" + tr.resolution.matched_word + "'");
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

  PcmBuffer audio = RenderUtterance(pieces, source_->sample_rate_hz(),
                                    stitch_cfg, seed, &report);
  return {std::move(audio), std::move(report), std::move(switched.report)};
}

CsStitchResult CsStitch(std::string_view sentence,
                        const std::map<std::string, const SpokenVocabBank*>& banks,
                        const CsDictionary& dict, const CsConfig& cs_cfg,
                        const StitchConfig& stitch_cfg,
                        const SpeakerPolicy& policy, uint64_t seed) {
  const auto src = banks.find(dict.source_lang());
  const auto tgt = banks.find(dict.target_lang());
  if (src == banks.end() || tgt == banks.end() || !src->second || !tgt->second) {
    throw InvalidArgument("banks for languages '" + dict.source_lang() +
                          "' and '" + dict.target_lang() + "' are required");
  }
  return CsStitcher(*src->second, *tgt->second, dict)
      .Stitch(sentence, cs_cfg, stitch_cfg, policy, seed);
}

}  // namespace stitchvox
