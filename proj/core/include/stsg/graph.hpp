#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stsg {

enum class Mobility { Static, Dynamic };

std::string mobility_name(Mobility m);
Mobility mobility_from_name(const std::string& name);

struct AttributeEntry {
  std::string kind;
  std::string value;

  bool operator==(const AttributeEntry&) const = default;
};

struct Anchor {
  std::string keyframe_id;
  double timestamp = 0.0;  // seconds

  bool operator==(const Anchor&) const = default;
};

struct ObjectNode {
  std::string id;
  std::string label;
  int instance_index = 1;
  std::string unique_attribute;  // may be empty when a label has one instance
  Mobility mobility = Mobility::Static;
  std::vector<AttributeEntry> attributes;
  std::vector<Anchor> anchors;

  bool operator==(const ObjectNode&) const = default;
};

struct RelationEdge {
  std::string subject_id;
  std::string object_id;
  std::string predicate;
  double timestamp = 0.0;
  std::string keyframe_id;

  bool operator==(const RelationEdge&) const = default;
};

struct MotionEdge {
  std::string object_id;              // must refer to a Dynamic node
  std::string predicate;              // verb phrase
  std::optional<std::string> target_id;
  double t1 = 0.0;
  double t2 = 0.0;

  bool operator==(const MotionEdge&) const = default;
};

struct NodeRef {
  std::string clip_id;
  std::string node_id;

  bool operator==(const NodeRef&) const = default;
};

struct ReferenceEdge {
  NodeRef from;
  NodeRef to;

  bool operator==(const ReferenceEdge&) const = default;
};

struct EventEdge {
  std::string clip_id;
  std::string description;  // one holistic sentence
  double t_start = 0.0;
  double t_end = 0.0;

  bool operator==(const EventEdge&) const = default;
};

struct FrameSceneGraph {
  std::string keyframe_id;
  double timestamp = 0.0;
  std::vector<ObjectNode> nodes;
  std::vector<RelationEdge> relations;

  bool operator==(const FrameSceneGraph&) const = default;

  const ObjectNode* find_node(const std::string& id) const;
};

struct ClipGraph {
  std::string clip_id;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<ObjectNode> nodes;
  std::vector<RelationEdge> relations;
  std::vector<MotionEdge> motions;
  std::optional<EventEdge> event;

  bool operator==(const ClipGraph&) const = default;

  const ObjectNode* find_node(const std::string& id) const;
};

struct SpatioTemporalSceneGraph {
  std::string video_id;
  std::vector<ClipGraph> clips;
  std::vector<ReferenceEdge> references;

  bool operator==(const SpatioTemporalSceneGraph&) const = default;

  const ClipGraph* find_clip(const std::string& clip_id) const;
  const ObjectNode* find_node(const std::string& clip_id, const std::string& node_id) const;
  std::size_t node_count() const;
};

struct Violation {
  std::string code;     // stable, e.g. "dangling-edge-endpoint"
  std::string subject;  // offending id or location
  std::string detail;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Every invariant violation is reported; a valid graph yields an empty report.
// Validation never throws.
ValidationReport validate(const SpatioTemporalSceneGraph& stsg);
ValidationReport validate_frame(const FrameSceneGraph& fsg);
ValidationReport validate_clip(const ClipGraph& clip);

// Deterministic node ids: "{scope}/{label}#{instance_index}" where scope is
// "{video_id}/{keyframe_id}" for FSG nodes and "{video_id}/{clip_id}" after merge.
std::string make_node_id(const std::string& scope_prefix, const std::string& label,
                         int instance_index);

}  // namespace stsg
