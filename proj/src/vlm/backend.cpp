// Copyright 2026 The vfr Authors
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

#include "vfr/vlm/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "vfr/error.hpp"

namespace vfr::vlm {

using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

json knobs_json(const OracleKnobs& k) {
  json j = {{"axis_accuracy", k.axis_accuracy},
            {"combined_accuracy", k.combined_accuracy},
            {"unanchored_penalty", k.unanchored_penalty},
            {"absolute_penalty", k.absolute_penalty},
            {"detection_accuracy", k.detection_accuracy},
            {"analysis_accuracy", k.analysis_accuracy},
            {"plan_accuracy", k.plan_accuracy},
            {"move_threshold", k.move_threshold}};
  j["stop_deadband"] = k.stop_deadband ? json(*k.stop_deadband) : json(nullptr);
  return j;
}

struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string body_excerpt(const std::string& body) {
  constexpr std::size_t kMax = 300;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

void LiveConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("live backend needs an endpoint");
  split_endpoint(endpoint);
  if (model.empty()) throw ConfigError("live backend needs a model name");
  if (token_env.empty()) throw ConfigError("live backend needs token_env");
  if (!(timeout_s > 0)) throw ConfigError("timeout_s must be positive");
  if (retries < 0) throw ConfigError("retries must be nonnegative");
  if (backoff_ms < 0) throw ConfigError("backoff_ms must be nonnegative");
  if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
  if (!(temperature >= 0)) throw ConfigError("temperature must be nonnegative");
  if (response_pointer.empty() || response_pointer.front() != '/') {
    throw ConfigError("response_pointer must be a JSON pointer");
  }
}

std::string describe(const BackendConfig& cfg) {
  if (const auto* o = std::get_if<OracleConfig>(&cfg)) {
    const auto& k = o->knobs;
    return "oracle(p=" + num(k.axis_accuracy) + ",q=" + num(k.combined_accuracy) + ",u=" + num(k.unanchored_penalty) +
           ",abs=" + num(k.absolute_penalty) + ",det=" + num(k.detection_accuracy) + ",seed=" + std::to_string(o->seed) +
           ")";
  }
  const auto& l = std::get<LiveConfig>(cfg);
  return "live(" + l.model + "@" + l.endpoint + ")";
}

json backend_to_json(const BackendConfig& cfg) {
  if (const auto* o = std::get_if<OracleConfig>(&cfg)) {
    return {{"kind", "oracle"}, {"seed", o->seed}, {"knobs", knobs_json(o->knobs)}};
  }
  const auto& l = std::get<LiveConfig>(cfg);
  return {{"kind", "live"},          {"endpoint", l.endpoint},       {"model", l.model},
          {"token_env", l.token_env}, {"timeout_s", l.timeout_s},     {"retries", l.retries},
          {"backoff_ms", l.backoff_ms}, {"max_tokens", l.max_tokens}, {"temperature", l.temperature},
          {"response_pointer", l.response_pointer}};
}

OracleBackend::OracleBackend(OracleConfig cfg) : cfg_(std::move(cfg)) { cfg_.knobs.validate(); }

std::string OracleBackend::complete(const ChatRequest& req) {
  if (!req.truth || !req.truth->query || !req.truth->rng) {
    throw InternalError("oracle backend called without a ground-truth channel");
  }
  return oracle_answer(*req.truth->query, req.truth->truth, cfg_.knobs, *req.truth->rng);
}

std::string OracleBackend::descriptor() const { return describe(BackendConfig{cfg_}); }

LiveBackend::LiveBackend(LiveConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string LiveBackend::descriptor() const { return describe(BackendConfig{cfg_}); }

std::string extract_response_text(const json& body, const std::string& pointer) {
  const json::json_pointer ptr(pointer);
  if (!body.contains(ptr)) throw ProtocolError("response has no field at " + pointer);
  const auto& v = body.at(ptr);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& part : v) {
      if (part.is_object() && part.contains("text") && part.at("text").is_string()) {
        if (!out.empty()) out += "\n";
        out += part.at("text").get<std::string>();
      }
    }
    return out;
  }
  throw ProtocolError("response field at " + pointer + " is not text");
}

std::string LiveBackend::complete(const ChatRequest& req) {
  const char* token = std::getenv(cfg_.token_env.c_str());
  if (!token || !*token) throw ConfigError("environment variable " + cfg_.token_env + " is not set");

  ChatRequest outgoing = req;
  outgoing.max_tokens = cfg_.max_tokens;
  outgoing.temperature = cfg_.temperature;
  const std::string body = serialize_request(outgoing, cfg_.model, cfg_.wire).dump();

  const auto ep = split_endpoint(cfg_.endpoint);
  httplib::Client client(ep.base);
  const auto secs = static_cast<time_t>(cfg_.timeout_s);
  const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  const httplib::Headers headers{{cfg_.auth_header, cfg_.auth_prefix + token}};

  std::string last_error;
  int last_status = 0;
  std::string last_body;
  for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long long>(cfg_.backoff_ms) << (attempt - 1)));
    }
    auto res = client.Post(ep.path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      // Malformed bodies surface as BackendError so transcripts can replay them.
      try {
        return extract_response_text(json::parse(res->body), cfg_.response_pointer);
      } catch (const json::exception& e) {
        throw BackendError(res->status, std::string("body is not JSON: ") + body_excerpt(res->body));
      } catch (const ProtocolError& e) {
        throw BackendError(res->status, e.what());
      }
    }
    last_status = res->status;
    last_body = res->body;
    // Rate limits and server errors are worth another attempt; other codes are final.
    if (res->status != 429 && res->status < 500) break;
  }
  if (last_status != 0) throw BackendError(last_status, body_excerpt(last_body));
  throw BackendUnavailable("endpoint " + cfg_.endpoint + " unreachable after " + std::to_string(cfg_.retries + 1) +
                           " attempt(s): " + last_error);
}

ScriptedBackend::ScriptedBackend(std::vector<Reply> replies, std::string descriptor)
    : replies_(std::move(replies)), descriptor_(std::move(descriptor)) {}

std::string ScriptedBackend::complete(const ChatRequest&) {
  std::lock_guard lock(mu_);
  if (next_ >= replies_.size()) throw InternalError("scripted backend ran out of replies");
  const auto& r = replies_[next_++];
  if (r.error_kind) {
    if (*r.error_kind == "backend_error") throw BackendError(r.status, r.text);
    throw BackendUnavailable(r.text);
  }
  return r.text;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return replies_.size() - next_;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
  if (const auto* o = std::get_if<OracleConfig>(&cfg)) return std::make_unique<OracleBackend>(*o);
  return std::make_unique<LiveBackend>(std::get<LiveConfig>(cfg));
}

}  // namespace vfr::vlm
