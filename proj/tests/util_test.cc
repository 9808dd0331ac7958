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

#include "stitchvox/util.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "test_util.h"

namespace stitchvox {
namespace {

TEST(HashTest, Fnv1aReferenceValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(HashTest, Sha256ReferenceValues) {
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Base64Test, Rfc4648Vectors) {
  const std::pair<const char*, const char*> cases[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},
      {"foo", "Zm9v"},  {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
      {"foobar", "Zm9vYmFy"}};
  for (const auto& [plain, encoded] : cases) {
    EXPECT_EQ(Base64Encode(plain), encoded);
    EXPECT_EQ(Base64Decode(encoded), plain);
  }
}

TEST(Base64Test, BinaryRoundTripAndRejectsGarbage) {
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
  EXPECT_EQ(Base64Decode(Base64Encode(bytes)), bytes);
  EXPECT_THROW(Base64Decode("@@@"), InvalidArgument);
}

TEST(RngTest, SplitMixReferenceSequence) {
  Rng rng(0);
  EXPECT_EQ(rng.NextU64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.NextU64(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.NextU64(), 0x06c45d188009454fULL);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    EXPECT_NE(x, c.NextU64());
  }
}

TEST(RngTest, UniformMomentsAndBounds) {
  Rng rng(9);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.NextDouble();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.Uniform(0.9, 1.1);
    ASSERT_GE(v, 0.9);
    ASSERT_LT(v, 1.1);
  }
}

TEST(RngTest, UniformIndexIsUnbiased) {
  Rng rng(17);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.UniformIndex(6)];
  // Chi-square with 5 degrees of freedom; 20.5 is the 0.1% critical value.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  EXPECT_LT(chi2, 20.5);
  EXPECT_EQ(rng.UniformIndex(1), 0u);
  EXPECT_THROW(rng.UniformIndex(0), InvalidArgument);
}

TEST(RngTest, GaussianMoments) {
  Rng rng(23);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.NextGaussian();
    sum += g;
    sum_sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
}

TEST(SeedTest, DerivedStreamsAreDistinctAndStable) {
  std::set<uint64_t> seen;
  for (uint64_t s = 0; s < 50; ++s) {
    for (uint64_t stream = 1; stream <= 6; ++stream) {
      EXPECT_TRUE(seen.insert(DeriveSeed(s, stream)).second);
    }
  }
  EXPECT_EQ(DeriveSeed(7, 3), DeriveSeed(7, 3));
  EXPECT_EQ(SeedForKey(7, "pair-1"), SeedForKey(7, "pair-1"));
  EXPECT_NE(SeedForKey(7, "pair-1"), SeedForKey(7, "pair-2"));
  EXPECT_NE(SeedForKey(7, "pair-1"), SeedForKey(8, "pair-1"));
}

TEST(Utf8Test, RoundTripAndErrors) {
  const std::string text = "añ€😀";
  const std::u32string cps = Utf8ToU32(text);
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], U'ñ');
  EXPECT_EQ(cps[3], U'\U0001F600');
  EXPECT_EQ(U32ToUtf8(cps), text);
  EXPECT_EQ(Utf8ToU32("x\xff"), (std::u32string{U'x', 0xfffd}));
  EXPECT_EQ(Utf8ToU32("\xe2\x82"), (std::u32string{0xfffd, 0xfffd}));
}

TEST(SplitTest, WhitespaceAndChar) {
  using V = std::vector<std::string>;
  EXPECT_EQ(SplitWhitespace("  the\tquick \n fox "), (V{"the", "quick", "fox"}));
  EXPECT_TRUE(SplitWhitespace(" \t ").empty());
  EXPECT_EQ(SplitChar("a\t\tb", '\t'), (V{"a", "", "b"}));
  EXPECT_EQ(SplitChar("", '\t'), V{""});
}

TEST(FileTest, WriteThenRead) {
  test::TempDir dir;
  const auto path = dir / "file.bin";
  WriteFileBytes(path, std::string("x\0y", 3));
  EXPECT_EQ(ReadFileBytes(path), std::string("x\0y", 3));
  EXPECT_THROW(ReadFileBytes(dir / "absent"), Error);
  EXPECT_THROW(WriteFileBytes(dir / "no" / "dir", "x"), Error);
}

}  // namespace
}  // namespace stitchvox
