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

#ifndef STITCHVOX_VOCAB_BANK_H_
#define STITCHVOX_VOCAB_BANK_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stitchvox/audio.h"
#include "stitchvox/matcher.h"

namespace stitchvox {

inline constexpr int kBankFormatVersion = 1;
inline constexpr std::string_view kBankMetaFile = "bank.json";
inline constexpr std::string_view kSnippetManifestFile = "snippets.jsonl";

// One line of snippets.jsonl.
struct SnippetEntry {
  std::string word;        // normalized
  std::string speaker_id;
  std::string path;        // relative to the bank directory
  int sample_rate_hz = 0;
  size_t num_samples = 0;
  std::string sha256;      // of the audio file bytes

  friend bool operator==(const SnippetEntry&, const SnippetEntry&) = default;
};

std::string SnippetEntryToJson(const SnippetEntry& entry);
SnippetEntry SnippetEntryFromJson(std::string_view line);

// Speaker-keyed word -> snippet store. Every speaker indexes the same word
// set and every snippet has the bank rate. Immutable once constructed, so a
// single instance can be read from many threads.
class SpokenVocabBank {
 public:
  using SnippetMap = std::map<std::string, std::map<std::string, PcmBuffer>>;

  // Builds an in-memory bank from speaker -> word -> audio. Words must be
  // normalized. Entries get synthetic paths and checksums of their WAV
  // encoding.
  static SpokenVocabBank FromSnippets(SnippetMap snippets);

  // Used by the loaders once audio is decoded and verified.
  static SpokenVocabBank FromEntries(int sample_rate_hz,
                                     std::vector<SnippetEntry> entries,
                                     std::vector<PcmBuffer> audio);

  int sample_rate_hz() const { return sample_rate_hz_; }
  const std::vector<std::string>& speakers() const { return speakers_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  // Sorted by speaker, then word.
  const std::vector<SnippetEntry>& entries() const { return entries_; }
  const Matcher& matcher() const { return *matcher_; }

  bool HasSpeaker(std::string_view speaker) const;

  // Exact-key lookup. nullptr when the word is not indexed; throws
  // InvalidArgument for an unknown speaker.
  const PcmBuffer* GetSnippet(std::string_view speaker,
                              std::string_view word) const;

 private:
  int sample_rate_hz_ = kDefaultSampleRate;
  std::vector<std::string> speakers_;
  std::vector<std::string> vocab_;
  std::vector<SnippetEntry> entries_;
  std::unordered_map<std::string, std::unordered_map<std::string, PcmBuffer>>
      index_;
  std::shared_ptr<const Matcher> matcher_;
};

// Scans <snippet_dir>/<speaker_id>/<word>.wav, normalizes words, checks the
// bank invariants, writes bank.json, snippets.jsonl and the audio files under
// out_dir, and returns the bank. out_dir may equal snippet_dir.
SpokenVocabBank BuildBank(const std::filesystem::path& snippet_dir,
                          const std::filesystem::path& out_dir);

// Eager load with per-file checksum verification.
SpokenVocabBank LoadBank(const std::filesystem::path& bank_dir);

class TtsAdapter {
 public:
  virtual ~TtsAdapter() = default;
  virtual PcmBuffer Render(std::string_view word,
                           std::string_view voice_id) const = 0;
};

// Deterministic stand-in for a TTS engine: 24 kHz, one 60 ms sine segment
// per character (frequency keyed by a stable hash of character and voice),
// total duration clamped to [120, 800] ms, amplitude 0.3, 5 ms ramps.
PcmBuffer MockTtsRender(std::string_view word, std::string_view voice_id);

class MockTts final : public TtsAdapter {
 public:
  PcmBuffer Render(std::string_view word,
                   std::string_view voice_id) const override {
    return MockTtsRender(word, voice_id);
  }
};

// Reads a word list (one per line), normalizes and deduplicates it, renders
// every (word, voice) pair through `adapter` into out_dir and builds the
// bank there.
SpokenVocabBank SynthesizeBank(const std::filesystem::path& vocab_file,
                               const std::vector<std::string>& voices,
                               const TtsAdapter& adapter,
                               const std::filesystem::path& out_dir);

// "v0", "v1", ... as used by `bank synth --voices N`.
std::vector<std::string> DefaultVoiceIds(int count);

}  // namespace stitchvox

#endif  // STITCHVOX_VOCAB_BANK_H_
