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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "stitchvox/audio.h"
#include "stitchvox/util.h"
#include "test_util.h"

namespace stitchvox {
namespace {

using test::Constant;
using test::DominantFrequency;
using test::Sine;
using test::TempDir;

// Hand-assembled WAV, independent of EncodeWav.
std::string HandWav(uint16_t format, uint16_t channels, uint32_t rate,
                    uint16_t bits, const std::string& data) {
  auto u16 = [](uint16_t v) {
    return std::string{static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  };
  auto u32 = [](uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
  };
  const uint16_t block = static_cast<uint16_t>(channels * bits / 8);
  std::string out = "RIFF" + u32(36 + static_cast<uint32_t>(data.size())) + "WAVE";
  out += "fmt " + u32(16) + u16(format) + u16(channels) + u32(rate) +
         u32(rate * block) + u16(block) + u16(bits);
  out += "data" + u32(static_cast<uint32_t>(data.size())) + data;
  return out;
}

std::string Pcm16Bytes(const std::vector<int16_t>& v) {
  std::string s(v.size() * 2, '\0');
  std::memcpy(s.data(), v.data(), s.size());
  return s;
}

TEST(PcmBufferTest, RejectsBadRateAndNonFinite) {
  EXPECT_THROW(PcmBuffer({0.0f}, 0), InvalidArgument);
  EXPECT_THROW(PcmBuffer({0.0f, NAN}, 24000), InvalidArgument);
  EXPECT_THROW(PcmBuffer({INFINITY}, 24000), InvalidArgument);
  EXPECT_NO_THROW(PcmBuffer({}, 24000));
}

TEST(WavTest, QuantizationRoundsHalfAwayFromZeroAndClamps) {
  EXPECT_EQ(QuantizeSample(0.5f), 16384);   // 16383.5 rounds up
  EXPECT_EQ(QuantizeSample(-0.5f), -16384);
  EXPECT_EQ(QuantizeSample(1.5f), 32767);
  EXPECT_EQ(QuantizeSample(-1.5f), -32768);
  EXPECT_EQ(QuantizeSample(0.0f), 0);
  EXPECT_EQ(QuantizeSample(1.0f), 32767);
}

TEST(WavTest, HeaderFieldsForMono24k) {
  const std::string bytes = EncodeWav(Constant(0.5f, 3, 24000));
  ASSERT_EQ(bytes.size(), 44u + 6u);
  auto u32_at = [&](size_t off) {
    uint32_t v = 0;
    std::memcpy(&v, bytes.data() + off, 4);
    return v;
  };
  auto u16_at = [&](size_t off) {
    uint16_t v = 0;
    std::memcpy(&v, bytes.data() + off, 2);
    return v;
  };
  EXPECT_EQ(bytes.substr(0, 4), "RIFF");
  EXPECT_EQ(u16_at(20), 1);       // PCM
  EXPECT_EQ(u16_at(22), 1);       // mono
  EXPECT_EQ(u32_at(24), 24000u);
  EXPECT_EQ(u32_at(28), 48000u);  // byte rate = 24000 * 2
  EXPECT_EQ(u16_at(32), 2);       // block align
  EXPECT_EQ(u16_at(34), 16);
  EXPECT_EQ(u32_at(40), 6u);
  EXPECT_EQ(static_cast<int16_t>(u16_at(44)), 16384);
}

TEST(WavTest, ReadsOneSecondOfSilence) {
  TempDir dir;
  WriteFileBytes(dir / "zero.wav",
                 HandWav(1, 1, 24000, 16, std::string(48000, '\0')));
  const PcmBuffer buf = ReadWav(dir / "zero.wav");
  EXPECT_EQ(buf.sample_rate_hz(), 24000);
  ASSERT_EQ(buf.size(), 24000u);
  for (float s : buf.samples()) EXPECT_EQ(s, 0.0f);
}

TEST(WavTest, StereoIsDownmixedByMean) {
  const std::string data = Pcm16Bytes({16384, -16384, 8192, 0});
  const PcmBuffer buf = DecodeWav(HandWav(1, 2, 16000, 16, data));
  ASSERT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf.samples()[0], 0.0f);
  EXPECT_FLOAT_EQ(buf.samples()[1], 0.125f);
  EXPECT_EQ(buf.sample_rate_hz(), 16000);
}

TEST(WavTest, ReadsFloat32) {
  const float vals[] = {0.25f, -0.75f, 1.0f};
  std::string data(sizeof vals, '\0');
  std::memcpy(data.data(), vals, sizeof vals);
  const PcmBuffer buf = DecodeWav(HandWav(3, 1, 24000, 32, data));
  ASSERT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.samples()[0], 0.25f);
  EXPECT_EQ(buf.samples()[1], -0.75f);
  EXPECT_EQ(buf.samples()[2], 1.0f);
}

TEST(WavTest, Pcm16ScaledBy32768) {
  const PcmBuffer buf =
      DecodeWav(HandWav(1, 1, 8000, 16, Pcm16Bytes({-32768, 32767, 1})));
  EXPECT_EQ(buf.samples()[0], -1.0f);
  EXPECT_EQ(buf.samples()[1], 32767.0f / 32768.0f);
  EXPECT_EQ(buf.samples()[2], 1.0f / 32768.0f);
}

TEST(WavTest, EmptyDataChunkIsLegal) {
  const PcmBuffer buf = DecodeWav(HandWav(1, 1, 24000, 16, ""));
  EXPECT_TRUE(buf.empty());
  EXPECT_EQ(buf.sample_rate_hz(), 24000);
}

TEST(WavTest, RejectsMalformedAndUnsupported) {
  EXPECT_THROW(DecodeWav("not a wav file at all"), Error);
  EXPECT_THROW(DecodeWav(HandWav(1, 1, 24000, 24, std::string(6, '\0'))), Error);
  EXPECT_THROW(DecodeWav(HandWav(2, 1, 24000, 16, std::string(4, '\0'))), Error);
  std::string truncated = HandWav(1, 1, 24000, 16, std::string(100, '\0'));
  truncated.resize(80);
  EXPECT_THROW(DecodeWav(truncated), Error);
  TempDir dir;
  EXPECT_THROW(ReadWav(dir / "missing.wav"), Error);
}

// Property: the stored int16 values are recovered exactly for any buffer.
TEST(WavTest, RoundTripPreservesQuantizedSamples) {
  std::mt19937_64 gen(7);
  TempDir dir;
  for (int trial = 0; trial < 25; ++trial) {
    const size_t n = std::uniform_int_distribution<size_t>(0, 3000)(gen);
    const PcmBuffer buf = test::RandomBuffer(gen, n, 24000);
    WriteWav(buf, dir / "rt.wav");
    const PcmBuffer back = ReadWav(dir / "rt.wav");
    ASSERT_EQ(back.size(), buf.size());
    for (size_t i = 0; i < n; ++i) {
      ASSERT_EQ(back.samples()[i] * 32768.0f,
                static_cast<float>(QuantizeSample(buf.samples()[i])));
    }
  }
}

TEST(ResampleTest, LengthFollowsRateRatio) {
  const PcmBuffer out = Resample(Constant(0.0f, 24000, 24000), 16000);
  EXPECT_EQ(out.sample_rate_hz(), 16000);
  EXPECT_NEAR(static_cast<double>(out.size()), 16000.0, 1.0);
  EXPECT_EQ(Resample(Constant(0.0f, 1001, 24000), 16000).size(), 667u);
  EXPECT_EQ(Resample(Constant(0.0f, 100, 16000), 24000).size(), 150u);
}

TEST(ResampleTest, PreservesDcAwayFromEdges) {
  for (int target : {16000, 8000, 44100, 22050}) {
    const PcmBuffer out = Resample(Constant(0.25f, 24000, 24000), target);
    for (size_t i = 64; i + 64 < out.size(); ++i) {
      ASSERT_NEAR(out.samples()[i], 0.25, 1e-3) << "target " << target << " i " << i;
    }
  }
}

TEST(ResampleTest, KeepsToneFrequency) {
  const PcmBuffer out = Resample(Sine(440.0, 24000, 24000), 16000);
  EXPECT_NEAR(DominantFrequency(out), 440.0, 2.0);
}

TEST(ResampleTest, AttenuatesAboveNewNyquist) {
  // 10 kHz is above the 8 kHz Nyquist of a 16 kHz output.
  const PcmBuffer out = Resample(Sine(10000.0, 24000, 24000), 16000);
  double energy = 0.0;
  for (size_t i = 64; i + 64 < out.size(); ++i) energy += out.samples()[i] * out.samples()[i];
  const double rms = std::sqrt(energy / (out.size() - 128));
  EXPECT_LT(rms, 0.01);
}

TEST(ResampleTest, SameRateIsIdentityAndBadRateThrows) {
  const PcmBuffer in = Sine(300.0, 500, 24000);
  EXPECT_EQ(Resample(in, 24000), in);
  EXPECT_THROW(Resample(in, 0), InvalidArgument);
}

TEST(ResampleTest, IsDeterministic) {
  const PcmBuffer in = Sine(1234.0, 5000, 24000);
  EXPECT_EQ(Resample(in, 22050), Resample(in, 22050));
}

TEST(CrossfadeTest, LengthArithmetic) {
  const PcmBuffer a = Constant(0.1f, 1000, 24000);
  const PcmBuffer b = Constant(0.2f, 800, 24000);
  EXPECT_EQ(CrossfadeLength(1000, 800, 10.0, 24000), 240u);
  EXPECT_EQ(CrossfadeConcat(a, b, 10.0).size(), 1560u);
  // Fade longer than either input is capped by the shorter one.
  EXPECT_EQ(CrossfadeConcat(a, b, 1000.0).size(), 1000u);
}

TEST(CrossfadeTest, ZeroFadeIsConcatenation) {
  const PcmBuffer a = Sine(100.0, 1000, 24000);
  const PcmBuffer b = Sine(300.0, 800, 24000);
  const PcmBuffer out = CrossfadeConcat(a, b, 0.0);
  ASSERT_EQ(out.size(), 1800u);
  std::vector<float> expected = a.samples();
  expected.insert(expected.end(), b.samples().begin(), b.samples().end());
  EXPECT_EQ(out.samples(), expected);
}

TEST(CrossfadeTest, LinearRampsSumToOne) {
  const PcmBuffer out =
      CrossfadeConcat(Constant(0.5f, 1000, 24000), Constant(0.5f, 800, 24000), 10.0);
  for (float s : out.samples()) EXPECT_NEAR(s, 0.5f, 1e-7f);
}

TEST(CrossfadeTest, OverlapUsesStatedWeights) {
  const PcmBuffer a = Constant(1.0f, 10, 1000);
  const PcmBuffer b = Constant(0.0f, 10, 1000);
  const PcmBuffer out = CrossfadeConcat(a, b, 4.0);  // fade_n = 4
  ASSERT_EQ(out.size(), 16u);
  for (size_t i = 0; i < 4; ++i) {
    const double t = (i + 1) / 5.0;
    EXPECT_FLOAT_EQ(out.samples()[6 + i], static_cast<float>(1.0 - t));
  }
  EXPECT_EQ(out.samples()[5], 1.0f);
  EXPECT_EQ(out.samples()[10], 0.0f);
}

TEST(CrossfadeTest, RateMismatchAndNegativeFadeThrow) {
  EXPECT_THROW(CrossfadeConcat(Constant(0, 10, 24000), Constant(0, 10, 16000), 1.0),
               InvalidArgument);
  EXPECT_THROW(CrossfadeConcat(Constant(0, 10, 24000), Constant(0, 10, 24000), -1.0),
               InvalidArgument);
}

TEST(CrossfadeTest, LengthIdentityHoldsForRandomInputs) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<size_t> len(0, 600);
  std::uniform_real_distribution<double> fade(0.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const size_t la = len(gen), lb = len(gen);
    const double f = fade(gen);
    const PcmBuffer out =
        CrossfadeConcat(Constant(0.1f, la, 24000), Constant(0.2f, lb, 24000), f);
    ASSERT_EQ(out.size(), la + lb - CrossfadeLength(la, lb, f, 24000));
  }
}

TEST(TempoTest, UnitFactorIsPassThrough) {
  const PcmBuffer in = Sine(440.0, 12345, 24000);
  EXPECT_EQ(ApplyTempo(in, 1.0), in);
}

TEST(TempoTest, LengthContract) {
  const PcmBuffer in = Sine(440.0, 24000, 24000);
  const PcmBuffer fast = ApplyTempo(in, 2.0);
  EXPECT_NEAR(static_cast<double>(fast.size()), 12000.0, 600.0);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> f(0.5, 2.0);
  for (int i = 0; i < 10; ++i) {
    const double factor = f(gen);
    const size_t n = 1000 + gen() % 20000;
    const PcmBuffer out = ApplyTempo(Sine(300.0, n, 24000), factor);
    EXPECT_NEAR(static_cast<double>(out.size()),
                std::round(static_cast<double>(n) / factor), 600.0);
  }
}

TEST(TempoTest, PreservesPitch) {
  const PcmBuffer out = ApplyTempo(Sine(440.0, 24000, 24000), 1.5);
  EXPECT_NEAR(DominantFrequency(out), 440.0, 5.0);
  const PcmBuffer slow = ApplyTempo(Sine(440.0, 12000, 24000), 0.7);
  EXPECT_NEAR(DominantFrequency(slow), 440.0, 5.0);
}

TEST(TempoTest, RejectsOutOfRangeFactor) {
  const PcmBuffer in = Sine(440.0, 100, 24000);
  EXPECT_THROW(ApplyTempo(in, 0.49), InvalidArgument);
  EXPECT_THROW(ApplyTempo(in, 2.01), InvalidArgument);
  EXPECT_THROW(ApplyTempo(in, NAN), InvalidArgument);
}

TEST(TempoTest, IsDeterministic) {
  const PcmBuffer in = Sine(523.0, 9000, 24000);
  EXPECT_EQ(ApplyTempo(in, 1.07), ApplyTempo(in, 1.07));
}

TEST(SpeedTest, UnitFactorIsIdentity) {
  const PcmBuffer in = Sine(440.0, 5000, 24000);
  const PcmBuffer out = ApplySpeed(in, 1.0);
  ASSERT_EQ(out.size(), in.size());
  for (size_t i = 0; i < in.size(); ++i) {
    EXPECT_NEAR(out.samples()[i], in.samples()[i], 1e-6);
  }
}

TEST(SpeedTest, HalfSpeedHalvesPitchAndDoublesLength) {
  const PcmBuffer in = Sine(440.0, 12000, 24000);
  const PcmBuffer out = ApplySpeed(in, 0.5);
  EXPECT_EQ(out.sample_rate_hz(), 24000);
  EXPECT_NEAR(static_cast<double>(out.size()), 24000.0, 1.0);
  EXPECT_NEAR(DominantFrequency(out), 220.0, 2.0);
}

TEST(SpeedTest, DoubleSpeedHalvesLength) {
  const PcmBuffer out = ApplySpeed(Sine(440.0, 24000, 24000), 2.0);
  EXPECT_NEAR(static_cast<double>(out.size()), 12000.0, 1.0);
  EXPECT_NEAR(DominantFrequency(out), 880.0, 2.0);
}

TEST(SpeedTest, ArbitraryFactorLengthAndPitch) {
  const PcmBuffer out = ApplySpeed(Sine(500.0, 24000, 24000), 1.037);
  EXPECT_NEAR(static_cast<double>(out.size()), std::round(24000 / 1.037), 1.0);
  EXPECT_NEAR(DominantFrequency(out), 518.5, 2.0);
  EXPECT_THROW(ApplySpeed(out, 0.3), InvalidArgument);
}

TEST(EchoTest, ImpulseResponse) {
  std::vector<float> x(500, 0.0f);
  x[0] = 1.0f;
  const PcmBuffer out = ApplyEcho(PcmBuffer(x, 1000), 100.0, 0.5);  // d = 100
  ASSERT_EQ(out.size(), 600u);
  for (size_t i = 0; i < out.size(); ++i) {
    const float expected = i == 0 ? 1.0f : (i == 100 ? 0.5f : 0.0f);
    ASSERT_EQ(out.samples()[i], expected) << i;
  }
}

TEST(EchoTest, ZeroDecayAppendsSilence) {
  const PcmBuffer in = Sine(200.0, 300, 24000);
  const PcmBuffer out = ApplyEcho(in, 5.0, 0.0);  // d = 120
  ASSERT_EQ(out.size(), 420u);
  for (size_t i = 0; i < 300; ++i) EXPECT_EQ(out.samples()[i], in.samples()[i]);
  for (size_t i = 300; i < 420; ++i) EXPECT_EQ(out.samples()[i], 0.0f);
}

TEST(EchoTest, SteadyStateClampsToOne) {
  const PcmBuffer out = ApplyEcho(Constant(0.8f, 1000, 1000), 100.0, 0.5);
  for (size_t i = 0; i < 100; ++i) EXPECT_FLOAT_EQ(out.samples()[i], 0.8f);
  for (size_t i = 100; i < 1000; ++i) EXPECT_EQ(out.samples()[i], 1.0f);
  for (size_t i = 1000; i < 1100; ++i) EXPECT_FLOAT_EQ(out.samples()[i], 0.4f);
}

TEST(EchoTest, RejectsBadParameters) {
  const PcmBuffer in = Constant(0.1f, 10, 24000);
  EXPECT_THROW(ApplyEcho(in, 0.0, 0.5), InvalidArgument);
  EXPECT_THROW(ApplyEcho(in, -3.0, 0.5), InvalidArgument);
  EXPECT_THROW(ApplyEcho(in, 0.01, 0.5), InvalidArgument);  // < 1 sample
  EXPECT_THROW(ApplyEcho(in, 10.0, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace stitchvox
