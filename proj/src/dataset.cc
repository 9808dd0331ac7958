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

#include "stitchvox/dataset.h"

#include <atomic>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include "stitchvox/util.h"

namespace stitchvox {

namespace fs = std::filesystem;

namespace {

std::string CleanField(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string SafeFileStem(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

MtLoadResult ParseMtTsv(std::string_view text, const MtLoadOptions& opts) {
  if (opts.max_tgt_words == 0) {
    throw InvalidArgument("max_tgt_words must be positive");
  }
  MtLoadResult result;
  std::vector<std::string> errors;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && opts.has_header) continue;
    if (line.empty()) continue;

    auto fields = SplitChar(line, '\t');
    std::string reason;
    if (fields.size() != 3) {
      reason = "expected 3 tab-separated columns, found " +
               std::to_string(fields.size());
    } else if (fields[0].empty()) {
      reason = "empty id";
    } else if (SplitWhitespace(fields[1]).empty()) {
      reason = "empty source text";
    } else if (SplitWhitespace(fields[2]).empty()) {
      reason = "empty target text";
    }
    if (!reason.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": " + reason);
      continue;
    }
    if (SplitWhitespace(fields[2]).size() > opts.max_tgt_words) {
      ++result.dropped_long;
      continue;
    }
    result.pairs.push_back(
        {std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  if (!errors.empty() && !opts.lenient) {
    std::string msg = "malformed MT rows:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(msg);
  }
  result.malformed = std::move(errors);
  return result;
}

MtLoadResult LoadMtTsv(const fs::path& path, const MtLoadOptions& opts) {
  try {
    return ParseMtTsv(ReadFileBytes(path), opts);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string DatasetManifest::ToTsv() const {
  std::string out(kManifestHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    out += CleanField(r.id) + '\t' + CleanField(r.audio) + '\t' +
           std::to_string(r.n_frames) + '\t' + CleanField(r.src_text) + '\t' +
           CleanField(r.tgt_text) + '\t' + CleanField(r.speaker) + '\n';
  }
  return out;
}

DatasetManifest DatasetManifest::FromTsv(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kManifestHeader) throw Error("manifest: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = SplitChar(line, '\t');
    if (f.size() != 6) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": expected 6 columns");
    }
    ManifestRow row{f[0], f[1], 0, f[3], f[4], f[5]};
    try {
      row.n_frames = std::stoull(f[2]);
    } catch (const std::exception&) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": bad n_frames '" + f[2] + "'");
    }
    m.rows.push_back(std::move(row));
  }
  if (line_no == 0) throw Error("manifest: missing header");
  return m;
}

size_t ValidateManifest(const fs::path& manifest_path) {
  const DatasetManifest m = DatasetManifest::FromTsv(ReadFileBytes(manifest_path));
  const fs::path base = manifest_path.parent_path();
  std::vector<std::string> problems;
  std::set<std::string> ids;
  for (const auto& r : m.rows) {
    if (!ids.insert(r.id).second) problems.push_back("duplicate id " + r.id);
    const fs::path audio = base / r.audio;
    try {
      const PcmBuffer buf = ReadWav(audio);
      if (buf.size() != r.n_frames) {
        problems.push_back(r.id + ": n_frames " + std::to_string(r.n_frames) +
                           " but " + audio.string() + " has " +
                           std::to_string(buf.size()));
      }
    } catch (const Error& e) {
      problems.push_back(r.id + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "manifest validation failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  return m.rows.size();
}

UtteranceGenerator MonolingualGenerator(const SpokenVocabBank& bank,
                                        SpeakerPolicy policy,
                                        StitchConfig cfg) {
  return [&bank, policy = std::move(policy), cfg = std::move(cfg)](
             const MtPair& pair, uint64_t seed) {
    StitchResult r = StitchSentence(pair.src_text, bank, policy, cfg, seed);
    return Utterance{std::move(r.audio), std::move(r.report), pair.src_text};
  };
}

UtteranceGenerator CodeSwitchGenerator(const CsStitcher& stitcher,
                                       CsConfig cs_cfg, SpeakerPolicy policy,
                                       StitchConfig cfg) {
  return [&stitcher, cs_cfg, policy = std::move(policy), cfg = std::move(cfg)](
             const MtPair& pair, uint64_t seed) {
    CsStitchResult r = stitcher.Stitch(pair.src_text, cs_cfg, cfg, policy, seed);
    std::string transcript;
    for (const auto& t : r.report.tokens) {
      if (!transcript.empty()) transcript.push_back(' ');
      transcript += t.token;
    }
    return Utterance{std::move(r.audio), std::move(r.report),
                     std::move(transcript)};
  };
}

uint64_t PairSeed(uint64_t seed, std::string_view id) {
  return SeedForKey(seed, id);
}

DatasetManifest ConvertMt(std::span<const MtPair> pairs,
                          const UtteranceGenerator& generate, uint64_t seed,
                          const fs::path& out_dir, const ConvertOptions& opts) {
  std::set<std::string> ids;
  std::set<std::string> stems;
  for (const auto& p : pairs) {
    if (!ids.insert(p.id).second) {
      throw InvalidArgument("duplicate pair id '" + p.id + "'");
    }
    if (!stems.insert(SafeFileStem(p.id)).second) {
      throw InvalidArgument("pair id '" + p.id +
                            "' collides with another id after file-name "
                            "sanitization");
    }
  }
  const fs::path audio_dir = out_dir / "audio";
  fs::create_directories(audio_dir);

  DatasetManifest manifest;
  manifest.rows.resize(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t i = next++; i < pairs.size(); i = next++) {
      const MtPair& pair = pairs[i];
      try {
        Utterance u = generate(pair, PairSeed(seed, pair.id));
        const std::string rel = "audio/" + SafeFileStem(pair.id) + ".wav";
        WriteWav(u.audio, out_dir / rel);
        manifest.rows[i] = {pair.id, rel, u.audio.size(), u.transcript,
                            pair.tgt_text, u.report.speaker_id};
      } catch (const std::exception& e) {
        errors[i] = std::make_exception_ptr(
            Error("pair '" + pair.id + "': " + e.what()));
      }
    }
  };
  const size_t threads = std::max<size_t>(1, std::min(opts.threads, pairs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  WriteFileBytes(out_dir / kManifestFile, manifest.ToTsv());
  return manifest;
}

DatasetManifest ConvertMt(std::span<const MtPair> pairs,
                          const SpokenVocabBank& bank,
                          const SpeakerPolicy& policy, const StitchConfig& cfg,
                          uint64_t seed, const fs::path& out_dir,
                          const ConvertOptions& opts) {
  return ConvertMt(pairs, MonolingualGenerator(bank, policy, cfg), seed,
                   out_dir, opts);
}

const StreamItem& MtStream::Iterator::operator*() const {
  if (!current_) current_ = stream_->Generate(index_);
  return *current_;
}

MtStream::MtStream(std::vector<MtPair> pairs, UtteranceGenerator generate,
                   uint64_t seed)
    : pairs_(std::make_shared<const std::vector<MtPair>>(std::move(pairs))),
      generate_(std::move(generate)),
      seed_(seed) {}

StreamItem MtStream::Generate(size_t index) const {
  const MtPair& pair = pairs_->at(index);
  StreamItem item;
  item.id = pair.id;
  item.tgt_text = pair.tgt_text;
  try {
    item.utterance = generate_(pair, PairSeed(seed_, pair.id));
  } catch (const std::exception& e) {
    item.error = e.what();
  }
  return item;
}

MtStream StreamMt(std::vector<MtPair> pairs, const SpokenVocabBank& bank,
                  const SpeakerPolicy& policy, const StitchConfig& cfg,
                  uint64_t seed) {
  return MtStream(std::move(pairs), MonolingualGenerator(bank, policy, cfg),
                  seed);
}

MixPlan MakeMixPlan(size_t st_count, size_t mt_count, MixRatio ratio) {
  if (ratio.st == 0 || ratio.mt == 0) {
    throw InvalidArgument("mix ratio terms must be positive");
  }
  MixPlan plan;
  plan.ratio = ratio;
  plan.schedule.reserve(st_count + mt_count);
  size_t st = st_count;
  size_t mt = mt_count;
  while (st >= ratio.st && mt >= ratio.mt) {
    plan.schedule.insert(plan.schedule.end(), ratio.st, MixLabel::kSt);
    plan.schedule.insert(plan.schedule.end(), ratio.mt, MixLabel::kMt);
    st -= ratio.st;
    mt -= ratio.mt;
  }
  plan.schedule.insert(plan.schedule.end(), st, MixLabel::kSt);
  plan.schedule.insert(plan.schedule.end(), mt, MixLabel::kMt);
  return plan;
}

}  // namespace stitchvox
