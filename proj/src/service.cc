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

#include "stitchvox/service.h"

#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "stitchvox/util.h"

namespace stitchvox {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

HttpReply ErrorReply(int status, std::string_view message) {
  ordered_json j;
  j["error"] = message;
  return {status, "application/json", j.dump() + "\n", {}, {}};
}

json ParseBody(std::string_view body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
std::optional<T> OptionalField(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("field '") + name + "' has the wrong type");
  }
}

uint64_t SeedField(const json& j, const char* name, bool* present) {
  const auto it = j.find(name);
  *present = false;
  if (it == j.end() || it->is_null()) return 0;
  if (it->is_number_unsigned()) {
    *present = true;
    return it->get<uint64_t>();
  }
  if (it->is_number_integer() && it->get<int64_t>() >= 0) {
    *present = true;
    return static_cast<uint64_t>(it->get<int64_t>());
  }
  throw InvalidArgument(std::string("field '") + name +
                        "' must be a non-negative integer");
}

struct BatchItem {
  std::string id;
  std::string text;
};

struct BatchPlan {
  std::vector<BatchItem> items;
  StitchConfig cfg;
  std::optional<std::string> speaker;
  uint64_t seed = 0;
};

}  // namespace

StitchRequest StitchRequest::FromJson(std::string_view body) {
  const json j = ParseBody(body);
  StitchRequest req;
  const auto text = OptionalField<std::string>(j, "text");
  if (!text) throw InvalidArgument("missing field 'text'");
  req.text = *text;
  if (TokenizeSentence(req.text).empty()) throw InvalidArgument("empty text");
  req.speaker = OptionalField<std::string>(j, "speaker");
  bool has_seed = false;
  const uint64_t seed = SeedField(j, "seed", &has_seed);
  if (has_seed) req.seed = seed;
  req.distort = OptionalField<bool>(j, "distort");
  req.output_rate_hz = OptionalField<int>(j, "output_rate_hz");
  if (req.output_rate_hz && *req.output_rate_hz <= 0) {
    throw InvalidArgument("output_rate_hz must be positive");
  }
  req.p = OptionalField<double>(j, "p");
  if (req.p && !(*req.p >= 0.0 && *req.p <= 1.0)) {
    throw InvalidArgument("p must be in [0, 1]");
  }
  const auto n = OptionalField<int64_t>(j, "n");
  if (n) {
    if (*n < 0) throw InvalidArgument("n must be non-negative");
    req.n = static_cast<size_t>(*n);
  }
  return req;
}

std::pair<std::string, int> ParseHostPort(std::string_view addr) {
  const size_t colon = addr.rfind(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == addr.size()) {
    throw InvalidArgument("address must be HOST:PORT, got '" +
                          std::string(addr) + "'");
  }
  int port = 0;
  try {
    size_t used = 0;
    port = std::stoi(std::string(addr.substr(colon + 1)), &used);
    if (used != addr.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw InvalidArgument("bad port in '" + std::string(addr) + "'");
  }
  if (port <= 0 || port > 65535) throw InvalidArgument("port out of range");
  return {std::string(addr.substr(0, colon)), port};
}

struct StitchService::Impl {
  std::shared_ptr<const SpokenVocabBank> bank;
  ServiceOptions options;
  std::shared_ptr<const SpokenVocabBank> cs_bank;
  std::unique_ptr<CsDictionary> cs_dict;
  std::unique_ptr<CsStitcher> cs_stitcher;
  httplib::Server server;

  StitchConfig ConfigFor(std::optional<bool> distort,
                         std::optional<int> rate) const {
    StitchConfig cfg = options.stitch;
    if (distort) cfg.distort = *distort;
    if (rate) cfg.output_rate_hz = *rate;
    return cfg;
  }

  SpeakerPolicy PolicyFor(const std::optional<std::string>& speaker) const {
    return speaker ? SpeakerPolicy::Fixed(*speaker)
                   : SpeakerPolicy::UniformRandom();
  }

  uint64_t SeedFor(const StitchRequest& req) const {
    return req.seed ? *req.seed : SeedForKey(options.default_seed, req.text);
  }

  BatchPlan ParseBatch(std::string_view body) const {
    const json j = ParseBody(body);
    const auto it = j.find("items");
    if (it == j.end() || !it->is_array()) {
      throw InvalidArgument("missing array field 'items'");
    }
    BatchPlan plan;
    for (const auto& item : *it) {
      if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
          !item.contains("text") || !item["text"].is_string()) {
        throw InvalidArgument("every item needs string fields 'id' and 'text'");
      }
      plan.items.push_back({item["id"].get<std::string>(),
                            item["text"].get<std::string>()});
    }
    bool has_seed = false;
    plan.seed = SeedField(j, "seed", &has_seed);
    if (!has_seed) plan.seed = options.default_seed;
    plan.speaker = OptionalField<std::string>(j, "speaker");
    const auto rate = OptionalField<int>(j, "output_rate_hz");
    if (rate && *rate <= 0) throw InvalidArgument("output_rate_hz must be positive");
    plan.cfg = ConfigFor(OptionalField<bool>(j, "distort"), rate);
    return plan;
  }

  std::string BatchLine(const BatchPlan& plan, size_t i) const {
    const BatchItem& item = plan.items[i];
    ordered_json line;
    line["id"] = item.id;
    try {
      StitchResult r = StitchSentence(item.text, *bank, PolicyFor(plan.speaker),
                                      plan.cfg, SeedForKey(plan.seed, item.id));
      line["wav_base64"] = Base64Encode(EncodeWav(r.audio));
      line["n_frames"] = r.audio.size();
      line["report"] = ordered_json::parse(StitchReportToJson(r.report));
    } catch (const std::exception& e) {
      line["error"] = e.what();
    }
    return line.dump(-1, ' ', true) + "\n";
  }
};

StitchService::StitchService(std::shared_ptr<const SpokenVocabBank> bank,
                             ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!bank) throw InvalidArgument("service requires a loaded bank");
  options.stitch.Validate();
  impl_->bank = std::move(bank);
  impl_->options = std::move(options);

  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    if (!reply.stitch_report.empty()) {
      res.set_header("X-Stitch-Report", reply.stitch_report);
    }
    if (!reply.cs_report.empty()) res.set_header("X-CS-Report", reply.cs_report);
    res.set_content(reply.body, reply.content_type);
  };
  auto& srv = impl_->server;
  srv.Get("/healthz", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, HandleHealth());
  });
  srv.Get("/v1/bank", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, HandleBankInfo());
  });
  srv.Post("/v1/stitch", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, HandleStitch(req.body));
  });
  srv.Post("/v1/cs-stitch", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, HandleCsStitch(req.body));
  });
  srv.Post("/v1/batch", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<BatchPlan> plan;
    try {
      plan = std::make_shared<BatchPlan>(impl_->ParseBatch(req.body));
    } catch (const InvalidArgument& e) {
      send(res, ErrorReply(400, e.what()));
      return;
    }
    if (plan->items.size() > impl_->options.max_batch) {
      send(res, ErrorReply(413, "batch of " + std::to_string(plan->items.size()) +
                                    " items exceeds the limit of " +
                                    std::to_string(impl_->options.max_batch)));
      return;
    }
    auto next = std::make_shared<size_t>(0);
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [this, plan, next](size_t, httplib::DataSink& sink) {
          if (*next >= plan->items.size()) {
            sink.done();
            return true;
          }
          const std::string line = impl_->BatchLine(*plan, (*next)++);
          return sink.write(line.data(), line.size());
        });
  });
}

StitchService::~StitchService() { Stop(); }

void StitchService::EnableCodeSwitching(
    std::shared_ptr<const SpokenVocabBank> target_bank, CsDictionary dict) {
  if (!target_bank) throw InvalidArgument("code-switching requires a target bank");
  auto d = std::make_unique<CsDictionary>(std::move(dict));
  auto stitcher = std::make_unique<CsStitcher>(*impl_->bank, *target_bank, *d);
  impl_->cs_bank = std::move(target_bank);
  impl_->cs_dict = std::move(d);
  impl_->cs_stitcher = std::move(stitcher);
}

HttpReply StitchService::HandleHealth() const {
  return {200, "text/plain", "ok", {}, {}};
}

HttpReply StitchService::HandleBankInfo() const {
  ordered_json j;
  j["speakers"] = impl_->bank->speakers();
  j["vocab_size"] = impl_->bank->vocab().size();
  j["sample_rate_hz"] = impl_->bank->sample_rate_hz();
  return {200, "application/json", j.dump() + "\n", {}, {}};
}

HttpReply StitchService::HandleStitch(std::string_view body) const {
  try {
    const StitchRequest req = StitchRequest::FromJson(body);
    StitchResult r = StitchSentence(req.text, *impl_->bank,
                                    impl_->PolicyFor(req.speaker),
                                    impl_->ConfigFor(req.distort, req.output_rate_hz),
                                    impl_->SeedFor(req));
    return {200, "audio/wav", EncodeWav(r.audio), StitchReportToJson(r.report), {}};
  } catch (const InvalidArgument& e) {
    return ErrorReply(400, e.what());
  } catch (const std::exception& e) {
    return ErrorReply(500, e.what());
  }
}

HttpReply StitchService::HandleCsStitch(std::string_view body) const {
  if (!impl_->cs_stitcher) {
    return ErrorReply(501, "code-switching is not configured on this server");
  }
  try {
    const StitchRequest req = StitchRequest::FromJson(body);
    CsConfig cs = impl_->options.cs;
    if (req.p) cs.p = *req.p;
    if (req.n) cs.n = *req.n;
    CsStitchResult r = impl_->cs_stitcher->Stitch(
        req.text, cs, impl_->ConfigFor(req.distort, req.output_rate_hz),
        impl_->PolicyFor(req.speaker), impl_->SeedFor(req));
    ordered_json cj;
    cj["switched"] = r.cs_report.switched;
    cj["selected_indices"] = r.cs_report.selected_indices;
    cj["replaced_indices"] = r.cs_report.replaced_indices;
    return {200, "audio/wav", EncodeWav(r.audio), StitchReportToJson(r.report),
            cj.dump()};
  } catch (const InvalidArgument& e) {
    return ErrorReply(400, e.what());
  } catch (const std::exception& e) {
    return ErrorReply(500, e.what());
  }
}

HttpReply StitchService::HandleBatch(std::string_view body) const {
  BatchPlan plan;
  try {
    plan = impl_->ParseBatch(body);
  } catch (const InvalidArgument& e) {
    return ErrorReply(400, e.what());
  }
  if (plan.items.size() > impl_->options.max_batch) {
    return ErrorReply(413, "batch of " + std::to_string(plan.items.size()) +
                               " items exceeds the limit of " +
                               std::to_string(impl_->options.max_batch));
  }
  std::string out;
  for (size_t i = 0; i < plan.items.size(); ++i) out += impl_->BatchLine(plan, i);
  return {200, "application/x-ndjson", std::move(out), {}, {}};
}

bool StitchService::Listen(std::string_view addr) {
  const auto [host, port] = ParseHostPort(addr);
  return impl_->server.listen(host, port);
}

int StitchService::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool StitchService::ListenAfterBind() { return impl_->server.listen_after_bind(); }

bool StitchService::IsRunning() const { return impl_->server.is_running(); }

void StitchService::WaitUntilReady() const { impl_->server.wait_until_ready(); }

void StitchService::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace stitchvox
