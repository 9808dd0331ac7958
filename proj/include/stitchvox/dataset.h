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

#ifndef STITCHVOX_DATASET_H_
#define STITCHVOX_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stitchvox/code_switch.h"
#include "stitchvox/stitcher.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox {

inline constexpr size_t kDefaultMaxTgtWords = 64;
inline constexpr std::string_view kManifestFile = "manifest.tsv";
inline constexpr std::string_view kManifestHeader =
    "id\taudio\tn_frames\tsrc_text\ttgt_text\tspeaker";

struct MtPair {
  std::string id;
  std::string src_text;
  std::string tgt_text;

  friend bool operator==(const MtPair&, const MtPair&) = default;
};

struct MtLoadOptions {
  // Pairs whose target has more whitespace tokens than this are dropped.
  size_t max_tgt_words = kDefaultMaxTgtWords;
  bool has_header = false;
  // Skip malformed rows instead of failing.
  bool lenient = false;
};

struct MtLoadResult {
  std::vector<MtPair> pairs;
  size_t dropped_long = 0;
  // "line N: reason" for every malformed row (lenient mode only).
  std::vector<std::string> malformed;
};

// id<TAB>src<TAB>tgt per line.
MtLoadResult ParseMtTsv(std::string_view text, const MtLoadOptions& opts = {});
MtLoadResult LoadMtTsv(const std::filesystem::path& path,
                       const MtLoadOptions& opts = {});

struct ManifestRow {
  std::string id;
  std::string audio;  // relative to the manifest directory
  size_t n_frames = 0;
  std::string src_text;
  std::string tgt_text;
  std::string speaker;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

struct DatasetManifest {
  std::vector<ManifestRow> rows;

  std::string ToTsv() const;
  static DatasetManifest FromTsv(std::string_view text);
};

// Re-reads every referenced WAV and checks n_frames and id uniqueness.
// Returns the row count; throws Error listing every problem found.
size_t ValidateManifest(const std::filesystem::path& manifest_path);

// One generated utterance plus the source-side transcript it speaks.
struct Utterance {
  PcmBuffer audio;
  StitchReport report;
  std::string transcript;
};

using UtteranceGenerator =
    std::function<Utterance(const MtPair& pair, uint64_t pair_seed)>;

UtteranceGenerator MonolingualGenerator(const SpokenVocabBank& bank,
                                        SpeakerPolicy policy, StitchConfig cfg);

// The transcript is the code-switched token sequence.
UtteranceGenerator CodeSwitchGenerator(const CsStitcher& stitcher,
                                       CsConfig cs_cfg, SpeakerPolicy policy,
                                       StitchConfig cfg);

// Seed for one pair; depends only on the master seed and the pair id.
uint64_t PairSeed(uint64_t seed, std::string_view id);

struct ConvertOptions {
  size_t threads = 1;
};

// Writes <out_dir>/audio/<id>.wav per pair and <out_dir>/manifest.tsv.
// Rows follow input order whatever the thread count.
DatasetManifest ConvertMt(std::span<const MtPair> pairs,
                          const UtteranceGenerator& generate, uint64_t seed,
                          const std::filesystem::path& out_dir,
                          const ConvertOptions& opts = {});

DatasetManifest ConvertMt(std::span<const MtPair> pairs,
                          const SpokenVocabBank& bank,
                          const SpeakerPolicy& policy, const StitchConfig& cfg,
                          uint64_t seed, const std::filesystem::path& out_dir,
                          const ConvertOptions& opts = {});

struct StreamItem {
  std::string id;
  std::string tgt_text;
  std::optional<Utterance> utterance;  // empty when generation failed
  std::string error;
};

// Lazy, restartable view that generates one utterance per pair on
// dereference. No disk I/O.
class MtStream {
 public:
  class Iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = StreamItem;
    using difference_type = std::ptrdiff_t;
    using pointer = const StreamItem*;
    using reference = const StreamItem&;

    Iterator() = default;
    Iterator(const MtStream* stream, size_t index)
        : stream_(stream), index_(index) {}

    const StreamItem& operator*() const;
    const StreamItem* operator->() const { return &**this; }
    Iterator& operator++() {
      ++index_;
      current_.reset();
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const Iterator& a, const Iterator& b) {
      return a.index_ == b.index_;
    }

   private:
    const MtStream* stream_ = nullptr;
    size_t index_ = 0;
    mutable std::optional<StreamItem> current_;
  };

  MtStream(std::vector<MtPair> pairs, UtteranceGenerator generate,
           uint64_t seed);

  Iterator begin() const { return Iterator(this, 0); }
  Iterator end() const { return Iterator(this, pairs_->size()); }
  size_t size() const { return pairs_->size(); }

  StreamItem Generate(size_t index) const;

 private:
  std::shared_ptr<const std::vector<MtPair>> pairs_;
  UtteranceGenerator generate_;
  uint64_t seed_;
};

MtStream StreamMt(std::vector<MtPair> pairs, const SpokenVocabBank& bank,
                  const SpeakerPolicy& policy, const StitchConfig& cfg,
                  uint64_t seed);

enum class MixLabel { kSt, kMt };

struct MixRatio {
  size_t st = 8;
  size_t mt = 1;
};

struct MixPlan {
  std::vector<MixLabel> schedule;
  MixRatio ratio;
};

// Repeats blocks of ratio.st ST labels followed by ratio.mt MT labels while
// both pools can fill a block, then appends leftover ST and MT labels.
MixPlan MakeMixPlan(size_t st_count, size_t mt_count, MixRatio ratio = {});

}  // namespace stitchvox

#endif  // STITCHVOX_DATASET_H_
