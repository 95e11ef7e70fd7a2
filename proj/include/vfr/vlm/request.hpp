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

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vfr/prompt/prompt.hpp"
#include "vfr/raster/image.hpp"

namespace vfr::vlm {

struct GroundTruthChannel;

enum class Role { System, User };

std::string_view to_string(Role r) noexcept;

struct TextPart {
  std::string text;
};

/// Encoded to PNG when the request is serialized.
struct ImagePart {
  std::shared_ptr<const raster::RasterImage> image;
  std::string media_type{"image/png"};
};

using Part = std::variant<TextPart, ImagePart>;

struct Message {
  Role role{Role::User};
  std::vector<Part> parts;
};

struct ChatRequest {
  std::vector<Message> messages;
  int max_tokens{1024};
  double temperature{0.0};
  /// Oracle-only sidecar. Never serialized.
  const GroundTruthChannel* truth{nullptr};

  /// Throws ConfigError without a user message or with an empty image part.
  void validate() const;
};

/// System turn with the task description, user turn with tagged images and
/// the query.
ChatRequest make_request(const prompt::SubQuery& q, int max_tokens = 1024, double temperature = 0.0);

/// Field names used on the wire. Defaults follow the documented body shape.
struct WireFormat {
  std::string max_tokens_field{"max_tokens"};
  std::string image_type{"image"};
  std::string image_data_field{"data"};
  std::string image_media_type_field{"media_type"};
};

/// Live request body: {model, temperature, max_tokens, messages:[{role,
/// content:[{type:"text",text} | {type:"image",data,media_type}]}]}.
nlohmann::json serialize_request(const ChatRequest& req, const std::string& model, const WireFormat& wire = {});

/// Inverse of serialize_request (images are decoded from base64 PNG).
ChatRequest request_from_json(const nlohmann::json& body, const WireFormat& wire = {});

}  // namespace vfr::vlm
