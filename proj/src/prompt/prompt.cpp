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

#include "vfr/prompt/prompt.hpp"

#include <algorithm>
#include <sstream>

#include "vfr/error.hpp"
#include "vfr/prompt/grammar.hpp"

namespace vfr::prompt {

namespace rs = vfr::raster;
using sim::Axis;
using sim::DiscreteAction;
using sim::TaskKind;

std::string_view color_name(ElementColor c) noexcept { return c == ElementColor::Red ? "red" : "blue"; }

std::string_view shape_name(ElementKind k) noexcept {
  switch (k) {
    case ElementKind::OutlineSquare: return "square";
    case ElementKind::FilledMarker: return "marker";
    case ElementKind::BoundingBox: return "bounding box";
  }
  return "?";
}

std::string element_phrase(const VisualElement& e) {
  return std::string(color_name(e.color)) + " " + std::string(shape_name(e.kind));
}

rs::Rgba element_rgba(ElementColor c) noexcept {
  return c == ElementColor::Red ? rs::palette::kRed : rs::palette::kBlue;
}

rs::RasterImage annotate(const rs::RasterImage& image, std::span<const VisualElement> elements) {
  rs::RasterImage out = image;
  for (const auto& e : elements) {
    const auto& a = e.anchor;
    if (a.empty() || a.x0 < 0 || a.y0 < 0 || a.x1 > image.width() || a.y1 > image.height()) {
      throw AnnotationError("element " + element_phrase(e) + " anchor [" + std::to_string(a.x0) + "," +
                            std::to_string(a.y0) + "," + std::to_string(a.x1) + "," + std::to_string(a.y1) +
                            ") is outside the " + std::to_string(image.width()) + "x" +
                            std::to_string(image.height()) + " image");
    }
    if (e.stroke < 1) throw AnnotationError("stroke width must be positive");
    const auto color = element_rgba(e.color);
    if (e.kind == ElementKind::FilledMarker) {
      rs::fill_rect(out, a, color);
    } else {
      rs::outline_rect(out, a, color, e.stroke);
    }
  }
  return out;
}

std::string TextPrompt::user_text() const { return query + "\n\n" + answer_instruction; }

std::string TextPrompt::full_text() const { return task_description + "\n\n" + user_text(); }

ImagePrompt ImagePrompt::make(rs::RasterImage base, std::vector<VisualElement> elements, std::string tag,
                              bool reference) {
  ImagePrompt p;
  p.image = std::make_shared<const rs::RasterImage>(elements.empty() ? std::move(base) : annotate(base, elements));
  p.elements = std::move(elements);
  p.reference = reference;
  p.tag = std::move(tag);
  return p;
}

std::string_view to_string(PromptVariant v) noexcept {
  switch (v) {
    case PromptVariant::Original: return "original";
    case PromptVariant::Relative: return "relative";
    case PromptVariant::RelativeDecomposed: return "relative_decomposed";
    case PromptVariant::Full: return "full";
  }
  return "?";
}

PromptVariant parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown prompt variant '" + std::string(name) + "'");
}

bool is_decomposed(PromptVariant v) noexcept {
  return v == PromptVariant::RelativeDecomposed || v == PromptVariant::Full;
}

bool draws_elements(PromptVariant v) noexcept { return v == PromptVariant::Full; }

std::string_view to_string(AnswerKind k) noexcept {
  switch (k) {
    case AnswerKind::Action: return "action";
    case AnswerKind::YesNo: return "yes_no";
    case AnswerKind::Reason: return "reason";
    case AnswerKind::Plan: return "plan";
  }
  return "?";
}

bool is_anchored(const SubQuery& q) {
  const std::string text = q.text.full_text();
  bool any = false;
  for (const auto& img : q.images) {
    for (const auto& e : img.elements) {
      any = true;
      if (text.find(element_phrase(e)) == std::string::npos) return false;
    }
  }
  return any;
}

bool is_relative_phrasing(const SubQuery& q) {
  return q.text.full_text().find("relative position") != std::string::npos;
}

namespace {

rs::PixelRect clip(const rs::PixelRect& r, int w, int h) { return r.intersect({0, 0, w, h}); }

struct Nouns {
  std::string mover;
  std::string target;
};

std::string task_description(TaskKind kind) {
  switch (kind) {
    case TaskKind::TargetReach:
      return "A robot gripper holds a blue cube. The cube has to end up on top of the green goal region.";
    case TaskKind::LegoAssembly:
      return "A robot gripper holds a blue Lego brick. Before pressing it down, the brick must line up exactly "
             "with the yellow target slot.";
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D:
      return "A gray robot gripper must be centered on a teal water bottle so that closing its fingers grasps "
             "the bottle.";
    case TaskKind::Rotation:
      return "A gray robot gripper bar must be turned until it lines up with the orange target outline.";
  }
  return {};
}

Nouns raw_nouns(TaskKind kind) {
  switch (kind) {
    case TaskKind::TargetReach: return {"blue cube", "green goal region"};
    case TaskKind::LegoAssembly: return {"blue Lego brick", "yellow target slot"};
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D: return {"gripper", "water bottle"};
    case TaskKind::Rotation: return {"gripper bar", "orange target outline"};
  }
  return {};
}

Nouns element_nouns(TaskKind kind) {
  switch (kind) {
    case TaskKind::TargetReach: return {"blue cube", "red square"};
    case TaskKind::LegoAssembly: return {"blue Lego brick", "red square"};
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D: return {"red marker on the gripper", "blue bounding box around the bottle"};
    case TaskKind::Rotation: return {"gripper bar tipped by the red marker", "blue bounding box around the outline"};
  }
  return {};
}

std::string view_line(const ImagePrompt& img) {
  if (img.tag == "side") {
    return "Image \"side\" is a side view: screen right is forward, screen left is backward, screen up is up.";
  }
  return "Image \"" + img.tag + "\" is a front view: screen right is the robot's right, screen up is up.";
}

std::string element_lines(std::span<const ImagePrompt> images) {
  std::string out;
  for (const auto& img : images) {
    for (const auto& e : img.elements) {
      out += "In image \"" + img.tag + "\" a " + element_phrase(e) + " marks the " + e.label.value_or("key object") +
             ".\n";
    }
  }
  return out;
}

std::string action_list(std::span<const DiscreteAction> actions) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out += ", ";
    out += sim::token(actions[i]);
  }
  return out;
}

std::string action_instruction(std::span<const DiscreteAction> grammar) {
  return "Reason briefly, then finish with one final line of the form\n" + std::string(kActionMarker) +
         " <token>\nLegal tokens: " + action_list(grammar) + ". Answer NONE when no movement is needed.";
}

std::string axis_question(Axis axis, const Nouns& n) {
  switch (axis) {
    case Axis::Vertical:
      return "Consider only the up-down direction. What is the relative position of the " + n.mover +
             " with respect to the " + n.target + ": higher, lower, or level with it? Higher means DOWN, lower "
             "means UP, level means NONE.";
    case Axis::Horizontal:
      return "Consider only the left-right direction in the front view. What is the relative position of the " +
             n.mover + " with respect to the " + n.target +
             ": to its left, to its right, or centered on it? Left of it means RIGHT, right of it means LEFT, "
             "centered means NONE.";
    case Axis::Depth:
      return "Consider only the forward-backward direction in the side view. What is the relative position of the " +
             n.mover + " with respect to the " + n.target +
             ": in front of it, behind it, or aligned with it? In front means BACKWARD, behind means FORWARD, "
             "aligned means NONE.";
    case Axis::Yaw:
      return "Consider only the rotation. What is the relative position, in angle, of the " + n.mover +
             " with respect to the " + n.target +
             ": turned clockwise from it, counterclockwise from it, or aligned? Clockwise means ROTATE_LEFT "
             "(a counterclockwise turn), counterclockwise means ROTATE_RIGHT, aligned means NONE.";
  }
  return {};
}

std::vector<ImagePrompt> images_for_axis(std::span<const ImagePrompt> images, Axis axis, const sim::TaskSpec& spec) {
  std::string want = "front";
  if (axis == Axis::Depth) want = "side";
  if (axis == Axis::Vertical) want = std::string(sim::to_string(sim::metric_view(spec).name));
  for (const auto& img : images) {
    if (img.tag == want) return {img};
  }
  throw ConfigError("no \"" + want + "\" view for the " + std::string(sim::to_string(axis)) + " query");
}

const char* kAssemblyDescription =
    "A robot is assembling a Lego structure on a baseplate. Image \"current\" shows the scene now; image "
    "\"reference\" shows the finished structure the robot must build. The red outline in the current image marks "
    "the cell where the next block belongs.";

std::string yes_no_instruction() {
  return "Explain what you see, then finish with one final line: " + std::string(kAnswerMarker) + " YES or " +
         std::string(kAnswerMarker) + " NO";
}

SubQuery yes_no_query(std::string id, std::string question, const ImagePrompt& current, const ImagePrompt& reference,
                      std::string subtask_line, std::optional<int> criterion) {
  SubQuery q;
  q.id = std::move(id);
  q.kind = AnswerKind::YesNo;
  q.text.task_description = std::string(kAssemblyDescription) + "\n" + subtask_line;
  q.text.query = std::move(question);
  q.text.answer_instruction = yes_no_instruction();
  q.images = {current, reference};
  q.labels = {"YES", "NO"};
  q.criterion = criterion;
  q.decomposed = criterion.has_value();
  return q;
}

std::string failure_hint(task::FailureType f) {
  switch (f) {
    case task::FailureType::FailToPick: return "the gripper came back empty";
    case task::FailureType::PickMultiple: return "the gripper holds more than one block of the right color";
    case task::FailureType::PickWrongColor: return "the gripper holds a single block of the wrong color";
    case task::FailureType::PickMultipleWithWrong: return "the gripper holds several blocks, some of the wrong color";
    case task::FailureType::FailToPlace: return "the block is still in the gripper, nothing was added";
    case task::FailureType::PlaceWrongColor: return "a block of the wrong color was placed at the marked cell";
    case task::FailureType::PlaceWrongPosition: return "the block was placed in a cell the reference leaves empty";
    case task::FailureType::StructureCollapse: return "the structure fell over";
  }
  return {};
}

}  // namespace

std::vector<VisualElement> scene_elements(const sim::Scene& scene, const sim::ViewSpec& view) {
  const auto k = sim::key_regions(scene, view);
  std::vector<VisualElement> out;
  const auto add = [&](const std::optional<rs::PixelRect>& r, ElementKind kind, ElementColor color, std::string label) {
    if (!r) return;
    const auto c = clip(*r, view.width, view.height);
    if (c.empty()) return;
    out.push_back({kind, color, c, std::move(label), kDefaultStroke});
  };
  switch (scene.spec.kind) {
    case TaskKind::TargetReach:
      add(k.goal, ElementKind::OutlineSquare, ElementColor::Red, "goal region");
      break;
    case TaskKind::LegoAssembly:
      add(k.goal, ElementKind::OutlineSquare, ElementColor::Red, "target slot");
      break;
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D:
      add(k.gripper_marker, ElementKind::FilledMarker, ElementColor::Red, "gripper");
      add(k.target_box, ElementKind::BoundingBox, ElementColor::Blue, "water bottle");
      break;
    case TaskKind::Rotation:
      add(k.gripper_marker, ElementKind::FilledMarker, ElementColor::Red, "tip of the gripper bar");
      add(k.target_box, ElementKind::BoundingBox, ElementColor::Blue, "target outline");
      break;
  }
  return out;
}

std::vector<ImagePrompt> motion_images(const sim::Scene& scene, PromptVariant variant) {
  const auto views = sim::default_views(scene.spec);
  auto rendered = sim::render_views(scene, views);
  std::vector<ImagePrompt> out;
  for (std::size_t i = 0; i < views.size(); ++i) {
    auto elements = draws_elements(variant) ? scene_elements(scene, views[i]) : std::vector<VisualElement>{};
    out.push_back(ImagePrompt::make(std::move(rendered[i]), std::move(elements),
                                    std::string(sim::to_string(views[i].name))));
  }
  return out;
}

QueryPlan build_motion_queries(std::span<const ImagePrompt> images, PromptVariant variant, const sim::TaskSpec& spec) {
  const auto views = sim::default_views(spec);
  if (images.size() != views.size()) {
    throw ConfigError("task " + std::string(sim::to_string(spec.kind)) + " needs " + std::to_string(views.size()) +
                      " view(s), got " + std::to_string(images.size()));
  }
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (images[i].tag != sim::to_string(views[i].name)) {
      throw ConfigError("expected view \"" + std::string(sim::to_string(views[i].name)) + "\" at position " +
                        std::to_string(i) + ", got \"" + images[i].tag + "\"");
    }
    if (!images[i].image) throw ConfigError("image prompt without pixels");
    const bool has = !images[i].elements.empty();
    if (draws_elements(variant) && !has) {
      throw ConfigError("variant full needs key elements on view \"" + images[i].tag + "\"");
    }
    if (!draws_elements(variant) && has) {
      throw ConfigError("variant " + std::string(to_string(variant)) + " must not carry key elements");
    }
  }

  const auto kind = spec.kind;
  const Nouns nouns = draws_elements(variant) ? element_nouns(kind) : raw_nouns(kind);
  std::string description = task_description(kind) + "\n";
  for (const auto& img : images) description += view_line(img) + "\n";
  if (draws_elements(variant)) description += element_lines(images);

  QueryPlan plan;
  if (is_decomposed(variant) || kind == TaskKind::Rotation) {
    for (auto axis : sim::enabled_axes(kind)) {
      const auto pair = sim::axis_pair(axis);
      SubQuery q;
      q.id = "axis:" + std::string(sim::to_string(axis));
      q.kind = AnswerKind::Action;
      q.axis = axis;
      q.decomposed = is_decomposed(variant);
      q.actions.assign(pair.begin(), pair.end());
      q.images = is_decomposed(variant) ? images_for_axis(images, axis, spec)
                                        : std::vector<ImagePrompt>(images.begin(), images.end());
      q.text.task_description = description;
      if (is_decomposed(variant) || variant == PromptVariant::Relative) {
        q.text.query = axis_question(axis, nouns);
      } else {
        q.text.query = "Which way should the " + nouns.mover + " turn so that it lines up with the " + nouns.target +
                       "? ROTATE_LEFT turns counterclockwise on screen, ROTATE_RIGHT clockwise.";
      }
      q.text.answer_instruction = action_instruction(q.actions);
      plan.push_back(std::move(q));
    }
    return plan;
  }

  SubQuery q;
  q.id = "combined";
  q.kind = AnswerKind::Action;
  q.actions = sim::task_actions(kind);
  q.actions.push_back(DiscreteAction::None);
  q.images.assign(images.begin(), images.end());
  q.text.task_description = description;
  if (variant == PromptVariant::Original) {
    q.text.query = "How should the gripper move so that the " + nouns.mover + " reaches the " + nouns.target +
                   "? Pick the single most useful movement.";
  } else {
    q.text.query = "Describe the relative position of the " + nouns.mover + " with respect to the " + nouns.target +
                   " along each direction the gripper can move. From that relative position, pick the single most "
                   "useful movement.";
  }
  q.text.answer_instruction = action_instruction(q.actions);
  plan.push_back(std::move(q));
  return plan;
}

QueryPlan build_detection_queries(task::Phase phase, const ImagePrompt& current, const ImagePrompt& reference,
                                  task::BlockColor target, DetectionMode mode) {
  if (!reference.reference) throw ConfigError("detection needs an image flagged as reference");
  const std::string color(task::to_string(target));
  QueryPlan plan;
  if (phase == task::Phase::Pick) {
    const std::string line = "The robot has just tried to pick up one " + color + " block.";
    if (mode == DetectionMode::Combined) {
      plan.push_back(yes_no_query("combined",
                                  "The gripper is required to pick up one " + color +
                                      " Lego brick, does the gripper successfully finish the pick up action in "
                                      "this image?",
                                  current, reference, line, std::nullopt));
      return plan;
    }
    plan.push_back(yes_no_query(
        "criterion:0", "Is the Lego block successfully picked up and attached to the robot gripper?", current,
        reference, line, 0));
    plan.push_back(yes_no_query("criterion:1",
                                "Does the picked-up block have the correct color? The correct color is " + color + ".",
                                current, reference, line, 1));
    plan.push_back(yes_no_query("criterion:2",
                                "Is the picked-up block a single unit or more than one block? Answer YES for a "
                                "single block and NO otherwise.",
                                current, reference, line, 2));
    return plan;
  }
  const std::string line = "The robot has just tried to place one " + color + " block at the marked cell.";
  if (mode == DetectionMode::Combined) {
    plan.push_back(yes_no_query("combined",
                                "The gripper is required to place one " + color +
                                    " Lego brick on the structure, does the gripper successfully finish the place "
                                    "action in this image?",
                                current, reference, line, std::nullopt));
    return plan;
  }
  plan.push_back(
      yes_no_query("criterion:0", "Has a new block been added to the structure?", current, reference, line, 0));
  plan.push_back(yes_no_query("criterion:1",
                              "Does the newly added block have the correct color? The correct color is " + color + ".",
                              current, reference, line, 1));
  plan.push_back(yes_no_query("criterion:2",
                              "Does the structure match the reference image in shape and block positions, with "
                              "every block standing intact?",
                              current, reference, line, 2));
  return plan;
}

std::vector<std::string> reason_labels() {
  std::vector<std::string> out;
  for (auto f : task::kAllFailures) out.emplace_back(task::failure_label(f));
  out.emplace_back(task::kOtherLabel);
  return out;
}

QueryPlan build_recovery_queries(std::string_view failure_report, std::span<const std::string> skill_catalog,
                                 const ImagePrompt& current, const ImagePrompt& reference) {
  if (failure_report.empty()) throw ConfigError("failure report is empty");
  if (skill_catalog.empty()) throw ConfigError("skill catalog is empty");

  QueryPlan plan;
  SubQuery analysis;
  analysis.id = "analysis";
  analysis.kind = AnswerKind::Reason;
  analysis.images = {current, reference};
  analysis.labels = reason_labels();
  analysis.text.task_description = kAssemblyDescription;
  std::string q = "A failure was detected:\n" + std::string(failure_report) +
                  "\n\nAnalyze step by step what went wrong, comparing the current image with the reference. "
                  "Then name the failure with one of these labels:\n";
  for (auto f : task::kAllFailures) {
    q += "- " + std::string(task::failure_label(f)) + ": " + failure_hint(f) + "\n";
  }
  q += "- " + std::string(task::kOtherLabel) + ": none of the above";
  analysis.text.query = q;
  analysis.text.answer_instruction =
      "Write the analysis first, then finish with one final line of the form\n" + std::string(kReasonMarker) +
      " <label>";
  plan.push_back(std::move(analysis));

  SubQuery planning;
  planning.id = "plan";
  planning.kind = AnswerKind::Plan;
  planning.images = {current, reference};
  planning.labels.assign(skill_catalog.begin(), skill_catalog.end());
  planning.text.task_description = kAssemblyDescription;
  std::string p = "Using only the skills below, write a recovery plan that finishes the current subtask and stops "
                  "there.\nSkills:\n";
  for (const auto& s : skill_catalog) p += "- " + s + "\n";
  p += "Pick takes the block the reference needs next; write \"Pick <color>\" to choose a color explicitly. At the "
       "discard location, Place drops everything the gripper holds.";
  planning.text.query = p;
  planning.text.answer_instruction = "Finish with a line containing only " + std::string(kPlanMarker) +
                                     " followed by one skill per line, at most " +
                                     std::to_string(task::kMaxPlanLength) + " lines.";
  plan.push_back(std::move(planning));
  return plan;
}

void attach_context(SubQuery& q, std::string_view prior_response) {
  q.text.query = "Your earlier failure analysis:\n" + std::string(prior_response) + "\n\n" + q.text.query;
}

namespace {

void dump_query(std::ostringstream& os, const SubQuery& q) {
  os << "### " << q.id << " (" << to_string(q.kind) << ")\n\n";
  os << "[system]\n" << q.text.task_description << "\n\n";
  os << "[user]\n" << q.text.user_text() << "\n\n";
  os << "[images]\n";
  for (const auto& img : q.images) {
    os << "- " << img.tag << (img.reference ? " (reference)" : "");
    for (const auto& e : img.elements) {
      os << "; " << element_phrase(e) << " at [" << e.anchor.x0 << "," << e.anchor.y0 << "," << e.anchor.x1 << ","
         << e.anchor.y1 << ")";
    }
    os << "\n";
  }
  os << "\n";
}

}  // namespace

std::string render_prompt_catalog(TaskKind kind, PromptVariant variant) {
  const auto spec = sim::default_task(kind);
  const auto scene = sim::init_scene(spec, 0);
  const auto images = motion_images(scene, variant);
  const auto plan = build_motion_queries(images, variant, spec);
  std::ostringstream os;
  os << "# " << sim::to_string(kind) << " / " << to_string(variant) << "\n\n";
  for (const auto& q : plan) dump_query(os, q);
  return os.str();
}

std::string render_task_prompt_catalog() {
  const std::vector<task::RefBlock> ref{{task::BlockColor::Green, {0, 0}},
                                        {task::BlockColor::Red, {1, 0}},
                                        {task::BlockColor::Blue, {0, 1}},
                                        {task::BlockColor::Yellow, {1, 1}}};
  const auto state = task::make_phase_state(ref, 1, task::Phase::Pick);
  const auto cur = ImagePrompt::make(task::render_assembly(state, false), {}, "current");
  const auto refimg = ImagePrompt::make(task::render_assembly(state, true), {}, "reference", true);
  std::ostringstream os;
  os << "# lego_assembly / task level\n\n";
  for (auto phase : {task::Phase::Pick, task::Phase::Place}) {
    for (auto mode : {DetectionMode::Decomposed, DetectionMode::Combined}) {
      os << "## detection: " << task::to_string(phase)
         << (mode == DetectionMode::Decomposed ? " (decomposed)" : " (combined)") << "\n\n";
      for (const auto& q : build_detection_queries(phase, cur, refimg, task::BlockColor::Red, mode)) dump_query(os, q);
    }
  }
  os << "## recovery\n\n";
  const auto catalog = task::skill_catalog();
  for (const auto& q :
       build_recovery_queries("attached: NO\ncorrect color: NO\nsingle unit: NO", catalog, cur, refimg)) {
    dump_query(os, q);
  }
  return os.str();
}

}  // namespace vfr::prompt
