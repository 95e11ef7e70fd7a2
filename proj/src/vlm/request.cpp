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

#include "vfr/vlm/request.hpp"

#include "vfr/encoding.hpp"
#include "vfr/error.hpp"
#include "vfr/raster/png.hpp"

namespace vfr::vlm {

using nlohmann::json;

std::string_view to_string(Role r) noexcept { return r == Role::System ? "system" : "user"; }

void ChatRequest::validate() const {
  bool user = false;
  for (const auto& m : messages) {
    user = user || m.role == Role::User;
    for (const auto& p : m.parts) {
      if (const auto* img = std::get_if<ImagePart>(&p)) {
        if (!img->image || img->image->empty()) throw ConfigError("image part without pixels");
        if (img->media_type != "image/png") throw ConfigError("unsupported media type " + img->media_type);
      }
    }
  }
  if (!user) throw ConfigError("request has no user message");
  if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
}

ChatRequest make_request(const prompt::SubQuery& q, int max_tokens, double temperature) {
  ChatRequest req;
  req.max_tokens = max_tokens;
  req.temperature = temperature;
  req.messages.push_back({Role::System, {TextPart{q.text.task_description}}});
  Message user{Role::User, {}};
  for (const auto& img : q.images) {
    user.parts.emplace_back(TextPart{"Image \"" + img.tag + "\"" + (img.reference ? " (reference)" : "") + ":"});
    user.parts.emplace_back(ImagePart{img.image, "image/png"});
  }
  user.parts.emplace_back(TextPart{q.text.user_text()});
  req.messages.push_back(std::move(user));
  return req;
}

json serialize_request(const ChatRequest& req, const std::string& model, const WireFormat& wire) {
  req.validate();
  json messages = json::array();
  for (const auto& m : req.messages) {
    json content = json::array();
    for (const auto& p : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&p)) {
        content.push_back({{"type", "text"}, {"text", t->text}});
      } else {
        const auto& img = std::get<ImagePart>(p);
        const auto png = raster::encode_png(*img.image);
        content.push_back({{"type", wire.image_type},
                           {wire.image_data_field, base64_encode(png)},
                           {wire.image_media_type_field, img.media_type}});
      }
    }
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", std::move(content)}});
  }
  json body;
  body["model"] = model;
  body["temperature"] = req.temperature;
  body[wire.max_tokens_field] = req.max_tokens;
  body["messages"] = std::move(messages);
  return body;
}

ChatRequest request_from_json(const json& body, const WireFormat& wire) {
  ChatRequest req;
  try {
    req.temperature = body.at("temperature").get<double>();
    req.max_tokens = body.at(wire.max_tokens_field).get<int>();
    for (const auto& m : body.at("messages")) {
      Message msg;
      const auto role = m.at("role").get<std::string>();
      if (role == "system") {
        msg.role = Role::System;
      } else if (role == "user") {
        msg.role = Role::User;
      } else {
        throw ParseError("unknown role '" + role + "'");
      }
      for (const auto& c : m.at("content")) {
        const auto type = c.at("type").get<std::string>();
        if (type == "text") {
          msg.parts.emplace_back(TextPart{c.at("text").get<std::string>()});
        } else if (type == wire.image_type) {
          const auto bytes = base64_decode(c.at(wire.image_data_field).get<std::string>());
          msg.parts.emplace_back(ImagePart{std::make_shared<const raster::RasterImage>(raster::decode_png(bytes)),
                                           c.at(wire.image_media_type_field).get<std::string>()});
        } else {
          throw ParseError("unknown content type '" + type + "'");
        }
      }
      req.messages.push_back(std::move(msg));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed request body: ") + e.what());
  }
  return req;
}

}  // namespace vfr::vlm
