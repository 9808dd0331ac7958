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

#ifndef STITCHVOX_UTIL_H_
#define STITCHVOX_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stitchvox {

// Base error for all runtime failures raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a caller violates an operation's precondition (bad text,
// unknown speaker, out-of-range parameter). The service maps it to 400.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// 64-bit FNV-1a. Stable across platforms and runs.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);

// splitmix64 finalizer.
uint64_t Mix64(uint64_t x);

// Derives an independent seed for a named sub-stream of `seed`.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Per-item seed from a master seed and a string key (pair id, item id).
uint64_t SeedForKey(uint64_t seed, std::string_view key);

// Small deterministic generator (splitmix64). All draws are defined here
// rather than through <random> distributions, whose outputs differ between
// standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64();
  // Uniform in [0, 1) with 53 bits of precision.
  double NextDouble();
  // Uniform in [lo, hi].
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be > 0.
  uint64_t UniformIndex(uint64_t n);
  // Standard normal via Box-Muller.
  double NextGaussian();

 private:
  uint64_t state_;
};

// Lowercase hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

std::string Base64Encode(std::string_view bytes);
std::string Base64Decode(std::string_view text);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// UTF-8 helpers. Invalid bytes decode to U+FFFD one byte at a time.
std::u32string Utf8ToU32(std::string_view text);
std::string U32ToUtf8(std::u32string_view text);

// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Splits on a single character, keeping empty fields.
std::vector<std::string> SplitChar(std::string_view text, char sep);

}  // namespace stitchvox

#endif  // STITCHVOX_UTIL_H_
