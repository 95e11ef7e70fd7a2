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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfr/raster/image.hpp"
#include "vfr/sim/scene.hpp"
#include "vfr/task/assembly.hpp"

namespace vfr::prompt {

enum class ElementKind { OutlineSquare, FilledMarker, BoundingBox };
enum class ElementColor { Red, Blue };

inline constexpr int kDefaultStroke = 2;
inline constexpr int kDefaultMarkerPx = 12;

struct VisualElement {
  ElementKind kind{ElementKind::OutlineSquare};
  ElementColor color{ElementColor::Red};
  raster::PixelRect anchor;
  std::optional<std::string> label;
  int stroke{kDefaultStroke};
  friend bool operator==(const VisualElement&, const VisualElement&) = default;
};

std::string_view color_name(ElementColor c) noexcept;
/// "square", "marker" or "bounding box".
std::string_view shape_name(ElementKind k) noexcept;
/// "<color> <shape>", the phrase a prompt uses to refer to the element.
std::string element_phrase(const VisualElement& e);
raster::Rgba element_rgba(ElementColor c) noexcept;

/// Draws the elements in order onto a copy. Throws AnnotationError when an
/// anchor is empty or leaves the image.
raster::RasterImage annotate(const raster::RasterImage& image, std::span<const VisualElement> elements);

struct TextPrompt {
  std::string task_description;
  std::string query;
  std::string answer_instruction;

  /// Query and answer instruction as one user-turn string.
  std::string user_text() const;
  /// All three parts, for keyword checks and catalog export.
  std::string full_text() const;
};

/// An image as sent to the model. `image` already has `elements` drawn on it.
struct ImagePrompt {
  std::shared_ptr<const raster::RasterImage> image;
  std::vector<VisualElement> elements;
  bool reference{false};
  /// View or role name shown to the model, e.g. "front" or "current".
  std::string tag;

  static ImagePrompt make(raster::RasterImage base, std::vector<VisualElement> elements, std::string tag,
                          bool reference = false);
};

enum class PromptVariant { Original, Relative, RelativeDecomposed, Full };

inline constexpr PromptVariant kAllVariants[] = {PromptVariant::Original, PromptVariant::Relative,
                                                 PromptVariant::RelativeDecomposed, PromptVariant::Full};

std::string_view to_string(PromptVariant v) noexcept;
/// Throws ConfigError.
PromptVariant parse_variant(std::string_view name);
bool is_decomposed(PromptVariant v) noexcept;
bool draws_elements(PromptVariant v) noexcept;

enum class AnswerKind { Action, YesNo, Reason, Plan };

std::string_view to_string(AnswerKind k) noexcept;

struct SubQuery {
  /// Stable identifier within the plan, e.g. "axis:vertical" or "criterion:1".
  std::string id;
  AnswerKind kind{AnswerKind::Action};
  TextPrompt text;
  std::vector<ImagePrompt> images;
  /// Legal ACTION tokens (Action kind).
  std::vector<sim::DiscreteAction> actions;
  /// Legal labels for YesNo, Reason and Plan kinds.
  std::vector<std::string> labels;
  /// Set for single-axis queries.
  std::optional<sim::Axis> axis;
  /// Part of a per-axis or per-criterion breakdown.
  bool decomposed{false};
  /// Set for decomposed detection queries (0-based).
  std::optional<int> criterion;
};

using QueryPlan = std::vector<SubQuery>;

/// True when the query's images carry elements and its text names every one
/// of them by color and shape.
bool is_anchored(const SubQuery& q);

/// True when the query asks about relative position rather than an absolute
/// movement command.
bool is_relative_phrasing(const SubQuery& q);

/// Renders the task's views and, for variants that use them, annotates key
/// elements. Anchors are clipped to the image; elements fully off-image are
/// dropped.
std::vector<ImagePrompt> motion_images(const sim::Scene& scene, PromptVariant variant);

/// Elements the Full variant draws for a view.
std::vector<VisualElement> scene_elements(const sim::Scene& scene, const sim::ViewSpec& view);

/// Throws ConfigError when the images do not match the views the variant needs.
QueryPlan build_motion_queries(std::span<const ImagePrompt> images, PromptVariant variant,
                               const sim::TaskSpec& spec);

enum class DetectionMode { Combined, Decomposed };

/// Yes/no questions on whether a pick or place attempt succeeded. YES always
/// means the checked condition holds.
QueryPlan build_detection_queries(task::Phase phase, const ImagePrompt& current, const ImagePrompt& reference,
                                  task::BlockColor target, DetectionMode mode = DetectionMode::Decomposed);

/// Analysis query followed by the planning query. Throws ConfigError on an
/// empty catalog or report.
QueryPlan build_recovery_queries(std::string_view failure_report, std::span<const std::string> skill_catalog,
                                 const ImagePrompt& current, const ImagePrompt& reference);

/// Appends an earlier response as context to a follow-up query.
void attach_context(SubQuery& q, std::string_view prior_response);

/// The eight failure labels plus "other", in canonical order.
std::vector<std::string> reason_labels();

/// Human-readable listing of every sub-query the variant produces for a
/// task, built from a sample scene.
std::string render_prompt_catalog(sim::TaskKind kind, PromptVariant variant);

/// Listing of the detection and recovery prompts for the assembly task.
std::string render_task_prompt_catalog();

}  // namespace vfr::prompt
