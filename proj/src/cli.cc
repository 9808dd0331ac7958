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

#include "stitchvox/cli.h"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "stitchvox/code_switch.h"
#include "stitchvox/dataset.h"
#include "stitchvox/service.h"
#include "stitchvox/stitcher.h"
#include "stitchvox/util.h"
#include "stitchvox/vocab_bank.h"

namespace stitchvox {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string EnvOr(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : std::move(fallback);
}

std::string ResolveBankDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  std::string env = EnvOr("STITCHVOX_BANK", "");
  if (env.empty()) {
    throw UsageError("--bank is required (or set STITCHVOX_BANK)");
  }
  return env;
}

// Options shared by the generation subcommands.
struct GenerationFlags {
  std::string bank;
  std::string speaker;
  uint64_t seed = 0;
  bool distort = false;
  int rate = 0;
  double fade_ms = kDefaultFadeMs;
  std::string filler{kDefaultFiller};
  bool expand_numbers = false;

  void Register(CLI::App* cmd, bool with_bank = true) {
    if (with_bank) {
      cmd->add_option("--bank", bank, "Bank directory (default: $STITCHVOX_BANK)");
    }
    cmd->add_option("--speaker", speaker, "Fixed speaker id (default: random)");
    cmd->add_option("--seed", seed, "Master seed");
    cmd->add_flag("--distort", distort, "Apply tempo/speed/echo distortion");
    cmd->add_option("--rate", rate, "Output sample rate (default: bank rate)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fade-ms", fade_ms, "Cross-fade length in ms")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--filler", filler, "Fallback word");
    cmd->add_flag("--expand-numbers", expand_numbers,
                  "Spell out digit tokens before lookup");
  }

  StitchConfig Config() const {
    StitchConfig cfg;
    cfg.fade_ms = fade_ms;
    cfg.output_rate_hz = rate;
    cfg.distort = distort;
    cfg.filler = filler;
    cfg.expand_numbers = expand_numbers;
    return cfg;
  }

  SpeakerPolicy Policy() const {
    return speaker.empty() ? SpeakerPolicy::UniformRandom()
                           : SpeakerPolicy::Fixed(speaker);
  }
};

struct MtFlags {
  std::string mt;
  std::string out_dir;
  size_t max_tgt_words = kDefaultMaxTgtWords;
  bool header = false;
  bool lenient = false;
  size_t threads = 1;
  bool stream_check = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("--mt", mt, "MT pairs TSV (id, src, tgt)")->required();
    cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    cmd->add_option("--max-tgt-words", max_tgt_words,
                    "Drop pairs whose target has more words")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--header", header, "MT file has a header row");
    cmd->add_flag("--lenient", lenient, "Skip malformed rows");
    cmd->add_option("--threads", threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--stream-check", stream_check,
                  "Regenerate on the fly and compare with the written files");
  }

  MtLoadResult Load(std::ostream& err) const {
    MtLoadOptions opts;
    opts.max_tgt_words = max_tgt_words;
    opts.has_header = header;
    opts.lenient = lenient;
    MtLoadResult r = LoadMtTsv(mt, opts);
    for (const auto& m : r.malformed) err << "skipped malformed row: " << m << "\n";
    if (r.dropped_long) {
      err << "dropped " << r.dropped_long << " pair(s) with more than "
          << max_tgt_words << " target words\n";
    }
    return r;
  }
};

// Re-generates every pair in memory and compares against the written WAVs.
size_t StreamCheck(const std::vector<MtPair>& pairs,
                   const UtteranceGenerator& generate, uint64_t seed,
                   const fs::path& out_dir, const DatasetManifest& manifest) {
  MtStream stream(pairs, generate, seed);
  size_t i = 0;
  size_t mismatches = 0;
  for (const StreamItem& item : stream) {
    const PcmBuffer written = ReadWav(out_dir / manifest.rows[i].audio);
    bool same = item.utterance && item.utterance->audio.size() == written.size();
    if (same) {
      const auto& a = item.utterance->audio.samples();
      const auto& b = written.samples();
      for (size_t k = 0; k < a.size(); ++k) {
        if (QuantizeSample(a[k]) != static_cast<int16_t>(std::lround(b[k] * 32768.0))) {
          same = false;
          break;
        }
      }
    }
    if (!same) ++mismatches;
    ++i;
  }
  return mismatches;
}

void EmitManifestSummary(std::ostream& out, bool as_json,
                         const DatasetManifest& manifest,
                         const MtLoadResult& loaded, const fs::path& out_dir,
                         std::optional<size_t> stream_mismatches) {
  size_t frames = 0;
  for (const auto& r : manifest.rows) frames += r.n_frames;
  if (as_json) {
    ordered_json j;
    j["pairs"] = manifest.rows.size();
    j["dropped_long"] = loaded.dropped_long;
    j["malformed"] = loaded.malformed.size();
    j["total_frames"] = frames;
    j["manifest"] = (out_dir / kManifestFile).string();
    if (stream_mismatches) j["stream_mismatches"] = *stream_mismatches;
    out << j.dump() << "\n";
  } else {
    out << "wrote " << manifest.rows.size() << " utterances (" << frames
        << " frames) to " << (out_dir / kManifestFile).string() << "\n";
    if (stream_mismatches) {
      out << "stream check: " << *stream_mismatches << " mismatch(es)\n";
    }
  }
}

// Parses "src=DIR,tgt=DIR"; the first entry is the source language.
std::vector<std::pair<std::string, std::string>> ParseBankList(
    const std::string& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& part : SplitChar(spec, ',')) {
    const size_t eq = part.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == part.size()) {
      throw UsageError("--banks expects LANG=DIR,LANG=DIR, got '" + spec + "'");
    }
    out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
  }
  if (out.size() != 2) {
    throw UsageError("--banks needs exactly two entries (source, target)");
  }
  return out;
}

void BankSummary(std::ostream& out, bool as_json, const SpokenVocabBank& bank,
                 const std::string& dir) {
  if (as_json) {
    ordered_json j;
    j["bank"] = dir;
    j["speakers"] = bank.speakers();
    j["vocab_size"] = bank.vocab().size();
    j["entries"] = bank.entries().size();
    j["sample_rate_hz"] = bank.sample_rate_hz();
    out << j.dump() << "\n";
  } else {
    out << dir << ": " << bank.speakers().size() << " speaker(s), "
        << bank.vocab().size() << " words, " << bank.entries().size()
        << " snippets at " << bank.sample_rate_hz() << " Hz\n";
  }
}

int Serve(StitchService& service, const std::string& addr, std::ostream& err) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const auto [host, port] = ParseHostPort(addr);
  std::atomic<bool> ok{true};
  std::thread listener([&] { ok = service.Listen(addr); });
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (!ok) return;
    err << "received signal " << sig << ", shutting down\n";
    service.Stop();
  });
  service.WaitUntilReady();
  if (service.IsRunning()) err << "listening on " << host << ":" << port << "\n";
  listener.join();
  if (!ok) {
    err << "error: failed to bind " << addr << "\n";
    // Wake the signal waiter so it can exit.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kExitRuntime;
  }
  waiter.join();
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"stitchvox: stitch word snippets into synthetic speech"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable summary on stdout");

  // bank
  auto* bank_cmd = app.add_subcommand("bank", "Build, synthesize or validate a bank");
  bank_cmd->require_subcommand(1);
  std::string snippets_dir, bank_out, vocab_file, validate_dir;
  int voices = 1;
  auto* build_cmd = bank_cmd->add_subcommand("build", "Index <speaker>/<word>.wav files");
  build_cmd->add_option("--snippets", snippets_dir, "Snippet directory")->required();
  build_cmd->add_option("--out", bank_out, "Output bank directory")->required();
  auto* synth_cmd = bank_cmd->add_subcommand("synth", "Render a word list with the mock TTS");
  synth_cmd->add_option("--vocab", vocab_file, "Word list, one per line")->required();
  synth_cmd->add_option("--voices", voices, "Number of voices")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", bank_out, "Output bank directory")->required();
  auto* validate_cmd = bank_cmd->add_subcommand("validate", "Verify checksums and invariants");
  validate_cmd->add_option("dir", validate_dir, "Bank directory")->required();

  // stitch
  auto* stitch_cmd = app.add_subcommand("stitch", "Stitch one sentence into a WAV file");
  GenerationFlags stitch_flags;
  stitch_flags.Register(stitch_cmd);
  std::string text, out_wav;
  stitch_cmd->add_option("--text", text, "Sentence to stitch")->required();
  stitch_cmd->add_option("--out", out_wav, "Output WAV path")->required();

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert MT pairs into ST data");
  GenerationFlags convert_flags;
  convert_flags.Register(convert_cmd);
  MtFlags convert_mt;
  convert_mt.Register(convert_cmd);

  // cs-convert
  auto* cs_cmd = app.add_subcommand("cs-convert", "Convert MT pairs with code-switching");
  GenerationFlags cs_flags;
  cs_flags.Register(cs_cmd, /*with_bank=*/false);
  MtFlags cs_mt;
  cs_mt.Register(cs_cmd);
  std::string banks_spec, dict_file;
  CsConfig cs_cfg;
  bool literal_draw = false;
  cs_cmd->add_option("--banks", banks_spec, "SRC=DIR,TGT=DIR")->required();
  cs_cmd->add_option("--dict", dict_file, "Dictionary TSV (source, target)")->required();
  cs_cmd->add_option("--p", cs_cfg.p, "Probability a sentence is switched")
      ->check(CLI::Range(0.0, 1.0));
  cs_cmd->add_option("--n", cs_cfg.n, "Words selected for switching");
  cs_cmd->add_flag("--literal-normal-draw", literal_draw,
                   "Switch when a standard-normal draw exceeds p");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP augmentation service");
  std::string serve_bank, serve_addr, cs_bank_dir, serve_dict;
  size_t max_batch = kDefaultMaxBatch;
  uint64_t serve_seed = 0;
  serve_cmd->add_option("--bank", serve_bank, "Bank directory (default: $STITCHVOX_BANK)");
  serve_cmd->add_option("--addr", serve_addr, "HOST:PORT (default: $STITCHVOX_ADDR or 127.0.0.1:8080)");
  serve_cmd->add_option("--cs-bank", cs_bank_dir, "Target-language bank for /v1/cs-stitch");
  serve_cmd->add_option("--dict", serve_dict, "Dictionary TSV for /v1/cs-stitch");
  serve_cmd->add_option("--max-batch", max_batch, "Largest accepted batch")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--seed", serve_seed, "Seed for requests that carry none");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Measure stitching throughput");
  GenerationFlags bench_flags;
  bench_flags.Register(bench_cmd);
  std::string sentences_file;
  int iters = 1;
  size_t bench_threads = 1;
  bench_cmd->add_option("--sentences", sentences_file, "One sentence per line")->required();
  bench_cmd->add_option("--iters", iters, "Passes over the sentence file")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench_threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  // manifest
  auto* manifest_cmd = app.add_subcommand("manifest", "Dataset manifest tools");
  manifest_cmd->require_subcommand(1);
  std::string manifest_path;
  auto* mvalidate_cmd = manifest_cmd->add_subcommand(
      "validate", "Check n_frames against the referenced WAV files");
  mvalidate_cmd->add_option("manifest", manifest_path, "manifest.tsv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (build_cmd->parsed()) {
      const SpokenVocabBank bank = BuildBank(snippets_dir, bank_out);
      BankSummary(out, as_json, bank, bank_out);
    } else if (synth_cmd->parsed()) {
      const SpokenVocabBank bank = SynthesizeBank(
          vocab_file, DefaultVoiceIds(voices), MockTts(), bank_out);
      BankSummary(out, as_json, bank, bank_out);
    } else if (validate_cmd->parsed()) {
      const SpokenVocabBank bank = LoadBank(validate_dir);
      BankSummary(out, as_json, bank, validate_dir);
    } else if (stitch_cmd->parsed()) {
      const SpokenVocabBank bank = LoadBank(ResolveBankDir(stitch_flags.bank));
      const StitchResult r =
          StitchSentence(text, bank, stitch_flags.Policy(), stitch_flags.Config(),
                         stitch_flags.seed);
      WriteWav(r.audio, out_wav);
      if (as_json) {
        out << StitchReportToJson(r.report) << "\n";
      } else {
        out << "wrote " << out_wav << " (" << r.audio.size() << " samples, speaker "
            << r.report.speaker_id << ", exact " << r.report.exact << ", fuzzy "
            << r.report.fuzzy << ", fallback " << r.report.fallback << ")\n";
      }
    } else if (convert_cmd->parsed()) {
      const SpokenVocabBank bank = LoadBank(ResolveBankDir(convert_flags.bank));
      const MtLoadResult loaded = convert_mt.Load(err);
      const UtteranceGenerator gen = MonolingualGenerator(
          bank, convert_flags.Policy(), convert_flags.Config());
      const DatasetManifest manifest = ConvertMt(
          loaded.pairs, gen, convert_flags.seed, convert_mt.out_dir,
          ConvertOptions{convert_mt.threads});
      std::optional<size_t> mismatches;
      if (convert_mt.stream_check) {
        mismatches = StreamCheck(loaded.pairs, gen, convert_flags.seed,
                                 convert_mt.out_dir, manifest);
      }
      EmitManifestSummary(out, as_json, manifest, loaded, convert_mt.out_dir,
                          mismatches);
      if (mismatches.value_or(0) > 0) return kExitRuntime;
    } else if (cs_cmd->parsed()) {
      const auto banks = ParseBankList(banks_spec);
      const SpokenVocabBank source = LoadBank(banks[0].second);
      const SpokenVocabBank target = LoadBank(banks[1].second);
      const CsDictionary dict =
          CsDictionary::LoadTsv(dict_file, banks[0].first, banks[1].first);
      const CsStitcher stitcher(source, target, dict);
      cs_cfg.literal_normal_draw = literal_draw;
      const MtLoadResult loaded = cs_mt.Load(err);
      const UtteranceGenerator gen =
          CodeSwitchGenerator(stitcher, cs_cfg, cs_flags.Policy(), cs_flags.Config());
      const DatasetManifest manifest =
          ConvertMt(loaded.pairs, gen, cs_flags.seed, cs_mt.out_dir,
                    ConvertOptions{cs_mt.threads});
      std::optional<size_t> mismatches;
      if (cs_mt.stream_check) {
        mismatches = StreamCheck(loaded.pairs, gen, cs_flags.seed, cs_mt.out_dir,
                                 manifest);
      }
      EmitManifestSummary(out, as_json, manifest, loaded, cs_mt.out_dir, mismatches);
      if (mismatches.value_or(0) > 0) return kExitRuntime;
    } else if (serve_cmd->parsed()) {
      const std::string dir = ResolveBankDir(serve_bank);
      const std::string addr = serve_addr.empty()
          ? EnvOr("STITCHVOX_ADDR", std::string(kDefaultServiceAddr))
          : serve_addr;
      ParseHostPort(addr);
      if (cs_bank_dir.empty() != serve_dict.empty()) {
        throw UsageError("--cs-bank and --dict must be given together");
      }
      auto bank = std::make_shared<const SpokenVocabBank>(LoadBank(dir));
      ServiceOptions opts;
      opts.max_batch = max_batch;
      opts.default_seed = serve_seed;
      StitchService service(bank, opts);
      if (!cs_bank_dir.empty()) {
        service.EnableCodeSwitching(
            std::make_shared<const SpokenVocabBank>(LoadBank(cs_bank_dir)),
            CsDictionary::LoadTsv(serve_dict));
      }
      err << "loaded bank " << dir << " (" << bank->vocab().size() << " words, "
          << bank->speakers().size() << " speaker(s))\n";
      return Serve(service, addr, err);
    } else if (bench_cmd->parsed()) {
      const SpokenVocabBank bank = LoadBank(ResolveBankDir(bench_flags.bank));
      std::vector<std::string> sentences;
      {
        std::istringstream in(ReadFileBytes(sentences_file));
        std::string line;
        while (std::getline(in, line)) {
          if (!TokenizeSentence(line).empty()) sentences.push_back(line);
        }
      }
      if (sentences.empty()) throw InvalidArgument("no usable sentences in " + sentences_file);
      const StitchConfig cfg = bench_flags.Config();
      const SpeakerPolicy policy = bench_flags.Policy();
      const size_t total = sentences.size() * static_cast<size_t>(iters);
      std::vector<size_t> samples(std::max<size_t>(1, bench_threads), 0);
      std::atomic<size_t> next{0};
      const auto start = std::chrono::steady_clock::now();
      auto worker = [&](size_t slot) {
        for (size_t i = next++; i < total; i = next++) {
          const auto r = StitchSentence(sentences[i % sentences.size()], bank,
                                        policy, cfg, DeriveSeed(bench_flags.seed, i));
          samples[slot] += r.audio.size();
        }
      };
      if (bench_threads <= 1) {
        worker(0);
      } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < bench_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
      }
      const double secs = std::chrono::duration<double>(
          std::chrono::steady_clock::now() - start).count();
      size_t total_samples = 0;
      for (size_t s : samples) total_samples += s;
      const double rate = secs > 0 ? static_cast<double>(total) / secs : 0.0;
      if (as_json) {
        ordered_json j;
        j["utterances"] = total;
        j["seconds"] = secs;
        j["utterances_per_sec"] = rate;
        j["total_samples"] = total_samples;
        j["threads"] = bench_threads;
        out << j.dump() << "\n";
      } else {
        out << "utterances: " << total << "\n"
            << "seconds: " << secs << "\n"
            << "utterances/sec: " << rate << "\n"
            << "total samples: " << total_samples << "\n";
      }
    } else if (mvalidate_cmd->parsed()) {
      const size_t rows = ValidateManifest(manifest_path);
      if (as_json) {
        out << ordered_json{{"manifest", manifest_path}, {"rows", rows}}.dump() << "\n";
      } else {
        out << manifest_path << ": " << rows << " row(s) OK\n";
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace stitchvox
