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

#ifndef STITCHVOX_SERVICE_H_
#define STITCHVOX_SERVICE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "stitchvox/code_switch.h"
#include "stitchvox/stitcher.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox {

inline constexpr std::string_view kDefaultServiceAddr = "127.0.0.1:8080";
inline constexpr size_t kDefaultMaxBatch = 256;

struct ServiceOptions {
  size_t max_batch = kDefaultMaxBatch;
  // Seed used to derive a per-request seed when the client sends none.
  uint64_t default_seed = 0;
  // Base configuration; requests may override distort and output rate.
  StitchConfig stitch;
  CsConfig cs;
};

// Parsed body of POST /v1/stitch and /v1/cs-stitch.
struct StitchRequest {
  std::string text;
  std::optional<std::string> speaker;
  std::optional<uint64_t> seed;
  std::optional<bool> distort;
  std::optional<int> output_rate_hz;
  std::optional<double> p;
  std::optional<size_t> n;

  // Throws InvalidArgument on malformed JSON, bad field types, or text that
  // is empty after normalization ("empty text").
  static StitchRequest FromJson(std::string_view body);
};

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
  std::string stitch_report;  // X-Stitch-Report header, if any
  std::string cs_report;      // X-CS-Report header, if any
};

// HTTP front end over one immutable bank. Every request is seeded from the
// request alone, so identical requests produce identical bytes.
class StitchService {
 public:
  StitchService(std::shared_ptr<const SpokenVocabBank> bank,
                ServiceOptions options = {});
  ~StitchService();

  StitchService(const StitchService&) = delete;
  StitchService& operator=(const StitchService&) = delete;

  // Enables /v1/cs-stitch. Validates the target bank against `dict`.
  void EnableCodeSwitching(std::shared_ptr<const SpokenVocabBank> target_bank,
                           CsDictionary dict);

  // Transport-independent handlers.
  HttpReply HandleHealth() const;
  HttpReply HandleBankInfo() const;
  HttpReply HandleStitch(std::string_view body) const;
  HttpReply HandleCsStitch(std::string_view body) const;
  // Returns one NDJSON line per item; status 413/400 on batch-level errors.
  HttpReply HandleBatch(std::string_view body) const;

  // Blocking listen on "host:port".
  bool Listen(std::string_view addr);
  // Binds an ephemeral port and returns it (tests); call ListenAfterBind.
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  bool IsRunning() const;
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Splits "host:port". Throws InvalidArgument when malformed.
std::pair<std::string, int> ParseHostPort(std::string_view addr);

}  // namespace stitchvox

#endif  // STITCHVOX_SERVICE_H_
