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

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vfr/vlm/oracle.hpp"
#include "vfr/vlm/request.hpp"

namespace vfr::vlm {

struct LiveConfig {
  /// Full URL, e.g. https://host/v1/chat/completions.
  std::string endpoint;
  std::string model;
  /// Name of the environment variable holding the bearer token.
  std::string token_env{"VFR_API_TOKEN"};
  std::string auth_header{"Authorization"};
  std::string auth_prefix{"Bearer "};
  double timeout_s{60.0};
  int retries{3};
  int backoff_ms{500};
  int max_tokens{1024};
  double temperature{0.0};
  /// JSON pointer to the response text.
  std::string response_pointer{"/choices/0/message/content"};
  WireFormat wire;

  void validate() const;
  friend bool operator==(const LiveConfig&, const LiveConfig&) = default;
};

struct OracleConfig {
  OracleKnobs knobs;
  std::uint64_t seed{0};
  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

using BackendConfig = std::variant<OracleConfig, LiveConfig>;

/// Short human-readable description, e.g. "oracle(p=1,q=0.7,...)".
std::string describe(const BackendConfig& cfg);

nlohmann::json backend_to_json(const BackendConfig& cfg);

/// Shareable handle; complete() may be called from several threads.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
  virtual bool is_oracle() const noexcept = 0;
  virtual std::string descriptor() const = 0;
  /// Seed mixed into each episode's answer stream (oracle only).
  virtual std::uint64_t stream_seed() const noexcept { return 0; }
};

class OracleBackend final : public Backend {
 public:
  explicit OracleBackend(OracleConfig cfg);
  /// Throws InternalError when the request has no ground-truth sidecar.
  std::string complete(const ChatRequest& req) override;
  bool is_oracle() const noexcept override { return true; }
  std::string descriptor() const override;
  std::uint64_t stream_seed() const noexcept override { return cfg_.seed; }
  const OracleConfig& config() const noexcept { return cfg_; }

 private:
  OracleConfig cfg_;
};

class LiveBackend final : public Backend {
 public:
  explicit LiveBackend(LiveConfig cfg);
  /// Throws BackendUnavailable after the retries are spent on transport
  /// failures, BackendError on a non-2xx answer.
  std::string complete(const ChatRequest& req) override;
  bool is_oracle() const noexcept override { return false; }
  std::string descriptor() const override;

 private:
  LiveConfig cfg_;
};

/// Plays back recorded responses in order. Used to re-execute transcripts.
class ScriptedBackend final : public Backend {
 public:
  struct Reply {
    std::string text;
    /// "backend_unavailable" or "backend_error" to re-raise a recorded failure.
    std::optional<std::string> error_kind;
    int status{0};
  };

  explicit ScriptedBackend(std::vector<Reply> replies, std::string descriptor = "scripted");
  /// Throws InternalError once the script is exhausted.
  std::string complete(const ChatRequest& req) override;
  bool is_oracle() const noexcept override { return false; }
  std::string descriptor() const override { return descriptor_; }
  std::size_t remaining() const;

 private:
  std::vector<Reply> replies_;
  std::string descriptor_;
  std::size_t next_{0};
  mutable std::mutex mu_;
};

/// Extracts the response text. Content given as a list of parts is joined.
std::string extract_response_text(const nlohmann::json& body, const std::string& pointer);

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

}  // namespace vfr::vlm
