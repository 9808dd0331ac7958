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

#include "stitchvox/vocab_bank.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stitchvox/util.h"

namespace stitchvox {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kMockSegmentMs = 60.0;
constexpr double kMockMinMs = 120.0;
constexpr double kMockMaxMs = 800.0;
constexpr double kMockRampMs = 5.0;
constexpr float kMockAmplitude = 0.3f;

std::string JoinList(const std::vector<std::string>& items, size_t limit = 20) {
  std::string out;
  for (size_t i = 0; i < items.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  if (items.size() > limit) {
    out += ", ... (" + std::to_string(items.size() - limit) + " more)";
  }
  return out;
}

bool IsUsableFileName(std::string_view word) {
  return !word.empty() && word != "." && word != ".." &&
         word.find('/') == std::string_view::npos &&
         word.find('\0') == std::string_view::npos;
}

void CheckRectangular(
    const std::map<std::string, std::set<std::string>>& words_by_speaker) {
  std::set<std::string> all;
  for (const auto& [speaker, words] : words_by_speaker) {
    all.insert(words.begin(), words.end());
  }
  std::string problems;
  for (const auto& [speaker, words] : words_by_speaker) {
    std::vector<std::string> missing;
    std::set_difference(all.begin(), all.end(), words.begin(), words.end(),
                        std::back_inserter(missing));
    if (!missing.empty()) {
      problems += "\n  speaker '" + speaker + "' is missing: " + JoinList(missing);
    }
  }
  if (!problems.empty()) {
    throw Error("bank is not rectangular (every speaker must index the same "
                "words):" + problems);
  }
}

void WriteManifests(const fs::path& out_dir, int rate,
                    const std::vector<std::string>& speakers,
                    size_t vocab_size,
                    const std::vector<SnippetEntry>& entries) {
  ordered_json meta;
  meta["version"] = kBankFormatVersion;
  meta["sample_rate_hz"] = rate;
  meta["speakers"] = speakers;
  meta["vocab_size"] = vocab_size;
  WriteFileBytes(out_dir / kBankMetaFile, meta.dump(2) + "\n");

  std::string lines;
  for (const auto& e : entries) {
    lines += SnippetEntryToJson(e);
    lines += '\n';
  }
  WriteFileBytes(out_dir / kSnippetManifestFile, lines);
}

}  // namespace

std::string SnippetEntryToJson(const SnippetEntry& entry) {
  ordered_json j;
  j["word"] = entry.word;
  j["speaker_id"] = entry.speaker_id;
  j["path"] = entry.path;
  j["sample_rate_hz"] = entry.sample_rate_hz;
  j["num_samples"] = entry.num_samples;
  j["sha256"] = entry.sha256;
  return j.dump();
}

SnippetEntry SnippetEntryFromJson(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    SnippetEntry e;
    e.word = j.at("word").get<std::string>();
    e.speaker_id = j.at("speaker_id").get<std::string>();
    e.path = j.at("path").get<std::string>();
    e.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    e.num_samples = j.at("num_samples").get<size_t>();
    e.sha256 = j.at("sha256").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("malformed snippet entry: ") + ex.what());
  }
}

SpokenVocabBank SpokenVocabBank::FromSnippets(SnippetMap snippets) {
  if (snippets.empty()) throw Error("empty bank");
  int rate = 0;
  std::vector<SnippetEntry> entries;
  std::vector<PcmBuffer> audio;
  for (auto& [speaker, words] : snippets) {
    for (auto& [word, buf] : words) {
      if (rate == 0) rate = buf.sample_rate_hz();
      SnippetEntry e;
      e.word = word;
      e.speaker_id = speaker;
      e.path = speaker + "/" + word + ".wav";
      e.sample_rate_hz = buf.sample_rate_hz();
      e.num_samples = buf.size();
      e.sha256 = Sha256Hex(EncodeWav(buf));
      entries.push_back(std::move(e));
      audio.push_back(std::move(buf));
    }
  }
  return FromEntries(rate, std::move(entries), std::move(audio));
}

SpokenVocabBank SpokenVocabBank::FromEntries(int sample_rate_hz,
                                             std::vector<SnippetEntry> entries,
                                             std::vector<PcmBuffer> audio) {
  if (entries.empty()) throw Error("empty bank");
  if (entries.size() != audio.size()) {
    throw Error("internal: entry/audio count mismatch");
  }
  SpokenVocabBank bank;
  bank.sample_rate_hz_ = sample_rate_hz;

  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return std::tie(entries[x].speaker_id, entries[x].word) <
           std::tie(entries[y].speaker_id, entries[y].word);
  });

  std::map<std::string, std::set<std::string>> words_by_speaker;
  for (size_t i : order) {
    SnippetEntry& e = entries[i];
    if (e.word.empty() || NormalizeToken(e.word) != e.word) {
      throw Error("snippet word '" + e.word + "' (speaker '" + e.speaker_id +
                  "') is not normalized");
    }
    if (e.sample_rate_hz != sample_rate_hz ||
        audio[i].sample_rate_hz() != sample_rate_hz) {
      throw Error("sample rate mismatch for " + e.speaker_id + "/" + e.word +
                  ": " + std::to_string(audio[i].sample_rate_hz()) +
                  " Hz vs bank " + std::to_string(sample_rate_hz) + " Hz");
    }
    if (!words_by_speaker[e.speaker_id].insert(e.word).second) {
      throw Error("duplicate word '" + e.word + "' for speaker '" +
                  e.speaker_id + "'");
    }
    bank.index_[e.speaker_id].emplace(e.word, std::move(audio[i]));
    bank.entries_.push_back(std::move(e));
  }
  CheckRectangular(words_by_speaker);

  for (const auto& [speaker, words] : words_by_speaker) {
    bank.speakers_.push_back(speaker);
  }
  const auto& first = words_by_speaker.begin()->second;
  bank.vocab_.assign(first.begin(), first.end());
  bank.matcher_ = std::make_shared<const Matcher>(bank.vocab_);
  return bank;
}

bool SpokenVocabBank::HasSpeaker(std::string_view speaker) const {
  return index_.count(std::string(speaker)) > 0;
}

const PcmBuffer* SpokenVocabBank::GetSnippet(std::string_view speaker,
                                             std::string_view word) const {
  const auto sit = index_.find(std::string(speaker));
  if (sit == index_.end()) {
    throw InvalidArgument("unknown speaker '" + std::string(speaker) + "'");
  }
  const auto wit = sit->second.find(std::string(word));
  return wit == sit->second.end() ? nullptr : &wit->second;
}

SpokenVocabBank BuildBank(const fs::path& snippet_dir, const fs::path& out_dir) {
  if (!fs::is_directory(snippet_dir)) {
    throw Error("snippet directory not found: " + snippet_dir.string());
  }
  struct Found {
    std::string speaker;
    std::string word;
    fs::path source;
    std::string bytes;
    PcmBuffer audio;
  };
  std::vector<Found> found;
  std::map<std::pair<std::string, std::string>, fs::path> seen;

  std::vector<fs::path> speaker_dirs;
  for (const auto& de : fs::directory_iterator(snippet_dir)) {
    if (de.is_directory()) speaker_dirs.push_back(de.path());
  }
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  for (const auto& dir : speaker_dirs) {
    const std::string speaker = dir.filename().string();
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(dir)) {
      if (de.is_regular_file() && de.path().extension() == ".wav") {
        files.push_back(de.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      const std::string word = NormalizeToken(file.stem().string());
      if (!IsUsableFileName(word)) {
        throw Error("cannot derive a word from file name: " + file.string());
      }
      auto [it, inserted] = seen.emplace(std::make_pair(speaker, word), file);
      if (!inserted) {
        throw Error("duplicate word '" + word + "' for speaker '" + speaker +
                    "': " + it->second.string() + " and " + file.string());
      }
      std::string bytes = ReadFileBytes(file);
      PcmBuffer audio;
      try {
        audio = DecodeWav(bytes);
      } catch (const Error& e) {
        throw Error(file.string() + ": " + e.what());
      }
      found.push_back({speaker, word, file, std::move(bytes), std::move(audio)});
    }
  }
  if (found.empty()) {
    throw Error("no snippets found under " + snippet_dir.string());
  }

  // The bank rate is the majority rate; every other file is an error.
  std::map<int, size_t> rate_counts;
  for (const auto& f : found) ++rate_counts[f.audio.sample_rate_hz()];
  int rate = 0;
  size_t best = 0;
  for (const auto& [r, count] : rate_counts) {
    if (count > best || (count == best && r == kDefaultSampleRate)) {
      rate = r;
      best = count;
    }
  }
  if (rate_counts.size() > 1) {
    std::vector<std::string> offending;
    for (const auto& f : found) {
      if (f.audio.sample_rate_hz() != rate) {
        offending.push_back(f.source.string() + " (" +
                            std::to_string(f.audio.sample_rate_hz()) + " Hz)");
      }
    }
    throw Error("mixed sample rates: bank rate is " + std::to_string(rate) +
                " Hz but found " + JoinList(offending));
  }

  std::map<std::string, std::set<std::string>> words_by_speaker;
  for (const auto& f : found) words_by_speaker[f.speaker].insert(f.word);
  CheckRectangular(words_by_speaker);

  fs::create_directories(out_dir);
  std::vector<SnippetEntry> entries;
  std::vector<PcmBuffer> audio;
  for (auto& f : found) {
    const fs::path rel = fs::path(f.speaker) / (f.word + ".wav");
    const fs::path dest = out_dir / rel;
    fs::create_directories(dest.parent_path());
    if (!fs::exists(dest) || !fs::equivalent(dest, f.source)) {
      WriteFileBytes(dest, f.bytes);
    }
    SnippetEntry e;
    e.word = f.word;
    e.speaker_id = f.speaker;
    e.path = rel.generic_string();
    e.sample_rate_hz = rate;
    e.num_samples = f.audio.size();
    e.sha256 = Sha256Hex(f.bytes);
    entries.push_back(std::move(e));
    audio.push_back(std::move(f.audio));
  }
  SpokenVocabBank bank =
      SpokenVocabBank::FromEntries(rate, std::move(entries), std::move(audio));
  WriteManifests(out_dir, rate, bank.speakers(), bank.vocab().size(),
                 bank.entries());
  return bank;
}

SpokenVocabBank LoadBank(const fs::path& bank_dir) {
  const fs::path meta_path = bank_dir / kBankMetaFile;
  const fs::path entries_path = bank_dir / kSnippetManifestFile;
  if (!fs::exists(meta_path)) throw Error("missing " + meta_path.string());
  if (!fs::exists(entries_path)) throw Error("missing " + entries_path.string());

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ReadFileBytes(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed " + meta_path.string() + ": " + e.what());
  }
  const int version = meta.value("version", 0);
  if (version != kBankFormatVersion) {
    throw Error("unsupported bank version " + std::to_string(version));
  }
  const int rate = meta.value("sample_rate_hz", 0);
  if (rate <= 0) throw Error("bank.json: invalid sample_rate_hz");

  std::vector<SnippetEntry> entries;
  std::vector<PcmBuffer> audio;
  std::istringstream lines(ReadFileBytes(entries_path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SnippetEntry e;
    try {
      e = SnippetEntryFromJson(line);
    } catch (const Error& ex) {
      throw Error(entries_path.string() + ":" + std::to_string(line_no) +
                  ": " + ex.what());
    }
    const std::string name = e.speaker_id + "/" + e.word;
    if (e.sample_rate_hz != rate) {
      throw Error("entry " + name + " has rate " +
                  std::to_string(e.sample_rate_hz) + " but bank.json says " +
                  std::to_string(rate));
    }
    const fs::path file = bank_dir / e.path;
    if (!fs::exists(file)) {
      throw Error("entry " + name + ": missing file " + file.string());
    }
    const std::string bytes = ReadFileBytes(file);
    if (Sha256Hex(bytes) != e.sha256) {
      throw Error("checksum mismatch for entry " + name + " (" +
                  file.string() + ")");
    }
    PcmBuffer buf;
    try {
      buf = DecodeWav(bytes);
    } catch (const Error& ex) {
      throw Error("entry " + name + ": " + ex.what());
    }
    if (buf.size() != e.num_samples) {
      throw Error("entry " + name + ": num_samples " +
                  std::to_string(e.num_samples) + " but file has " +
                  std::to_string(buf.size()));
    }
    if (buf.sample_rate_hz() != rate) {
      throw Error("entry " + name + ": file rate " +
                  std::to_string(buf.sample_rate_hz()) + " vs bank " +
                  std::to_string(rate));
    }
    entries.push_back(std::move(e));
    audio.push_back(std::move(buf));
  }
  if (entries.empty()) throw Error("empty bank");

  SpokenVocabBank bank =
      SpokenVocabBank::FromEntries(rate, std::move(entries), std::move(audio));
  if (meta.contains("speakers") &&
      meta["speakers"].get<std::vector<std::string>>() != bank.speakers()) {
    throw Error("bank.json speaker list does not match snippets.jsonl");
  }
  if (meta.contains("vocab_size") &&
      meta["vocab_size"].get<size_t>() != bank.vocab().size()) {
    throw Error("bank.json vocab_size does not match snippets.jsonl");
  }
  return bank;
}

PcmBuffer MockTtsRender(std::string_view word, std::string_view voice_id) {
  if (word.empty()) throw InvalidArgument("mock TTS: empty word");
  const std::u32string chars = Utf8ToU32(word);
  const size_t n = chars.size();
  const int sr = kDefaultSampleRate;
  const double total_ms =
      std::clamp(kMockSegmentMs * static_cast<double>(n), kMockMinMs, kMockMaxMs);
  const auto total = static_cast<size_t>(std::llround(total_ms * sr / 1000.0));
  const auto ramp_full = static_cast<size_t>(std::llround(kMockRampMs * sr / 1000.0));

  std::vector<float> out(total, 0.0f);
  for (size_t k = 0; k < n; ++k) {
    const size_t begin = k * total / n;
    const size_t end = (k + 1) * total / n;
    const size_t seg = end - begin;
    std::string key = U32ToUtf8(std::u32string(1, chars[k]));
    key.push_back('\x1f');
    key.append(voice_id);
    const double freq = 200.0 + 25.0 * static_cast<double>(Fnv1a64(key) % 120);
    const size_t ramp = std::max<size_t>(1, std::min(ramp_full, seg / 2));
    for (size_t i = 0; i < seg; ++i) {
      double gain = 1.0;
      if (i < ramp) gain = static_cast<double>(i) / ramp;
      if (seg - 1 - i < ramp) {
        gain = std::min(gain, static_cast<double>(seg - 1 - i) / ramp);
      }
      out[begin + i] = static_cast<float>(
          kMockAmplitude * gain *
          std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / sr));
    }
  }
  return PcmBuffer(std::move(out), sr);
}

SpokenVocabBank SynthesizeBank(const fs::path& vocab_file,
                               const std::vector<std::string>& voices,
                               const TtsAdapter& adapter,
                               const fs::path& out_dir) {
  if (voices.empty()) throw InvalidArgument("at least one voice is required");
  std::istringstream in(ReadFileBytes(vocab_file));
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& raw : SplitWhitespace(line)) {
      std::string w = NormalizeToken(raw);
      if (w.empty()) continue;
      if (!IsUsableFileName(w)) {
        throw InvalidArgument("word '" + w + "' cannot be stored as a file");
      }
      words.insert(std::move(w));
    }
  }
  if (words.empty()) {
    throw InvalidArgument("vocabulary file is empty: " + vocab_file.string());
  }
  for (const auto& voice : voices) {
    const fs::path dir = out_dir / voice;
    fs::create_directories(dir);
    for (const auto& w : words) {
      PcmBuffer audio;
      try {
        audio = adapter.Render(w, voice);
      } catch (const std::exception& e) {
        throw Error("TTS render failed for word '" + w + "', voice '" + voice +
                    "': " + e.what());
      }
      WriteWav(audio, dir / (w + ".wav"));
    }
  }
  return BuildBank(out_dir, out_dir);
}

std::vector<std::string> DefaultVoiceIds(int count) {
  if (count <= 0) throw InvalidArgument("voice count must be positive");
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

}  // namespace stitchvox
