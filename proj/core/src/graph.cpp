#include "stsg/graph.hpp"

#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "stsg/error.hpp"

namespace stsg {

std::string mobility_name(Mobility m) {
  return m == Mobility::Static ? "static" : "dynamic";
}

Mobility mobility_from_name(const std::string& name) {
  if (name == "static") return Mobility::Static;
  if (name == "dynamic") return Mobility::Dynamic;
  throw InputError("bad-mobility", "unknown mobility value: " + name);
}

const ObjectNode* FrameSceneGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const ObjectNode* ClipGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const ClipGraph* SpatioTemporalSceneGraph::find_clip(const std::string& clip_id) const {
  for (const auto& c : clips) {
    if (c.clip_id == clip_id) return &c;
  }
  return nullptr;
}

const ObjectNode* SpatioTemporalSceneGraph::find_node(const std::string& clip_id,
                                                      const std::string& node_id) const {
  const ClipGraph* clip = find_clip(clip_id);
  return clip ? clip->find_node(node_id) : nullptr;
}

std::size_t SpatioTemporalSceneGraph::node_count() const {
  std::size_t n = 0;
  for (const auto& c : clips) n += c.nodes.size();
  return n;
}

std::string make_node_id(const std::string& scope_prefix, const std::string& label,
                         int instance_index) {
  return scope_prefix + "/" + label + "#" + std::to_string(instance_index);
}

namespace {

void check_nodes(const std::vector<ObjectNode>& nodes, const std::string& where,
                 bool require_anchors, ValidationReport& report) {
  std::unordered_set<std::string> ids;
  std::set<std::pair<std::string, int>> identities;
  for (const auto& node : nodes) {
    if (node.label.empty()) {
      report.push_back({"empty-label", node.id, where + ": node label is empty"});
    }
    if (node.instance_index < 1) {
      report.push_back({"bad-instance-index", node.id,
                        where + ": instance_index must be >= 1"});
    }
    if (!ids.insert(node.id).second) {
      report.push_back({"duplicate-node-id", node.id, where + ": node id repeats"});
    }
    if (!identities.insert({node.label, node.instance_index}).second) {
      report.push_back({"duplicate-instance", node.id,
                        where + ": (label, instance_index) repeats"});
    }
    if (require_anchors && node.anchors.empty()) {
      report.push_back({"missing-anchors", node.id, where + ": node has no anchors"});
    }
    for (const auto& attr : node.attributes) {
      if (attr.kind.empty() || attr.value.empty()) {
        report.push_back({"empty-attribute", node.id,
                          where + ": attribute kind/value must be non-empty"});
      }
    }
  }
}

void check_relations(const std::vector<RelationEdge>& relations,
                     const std::unordered_set<std::string>& node_ids,
                     const std::string& where, ValidationReport& report) {
  for (const auto& rel : relations) {
    if (rel.predicate.empty()) {
      report.push_back({"empty-predicate", rel.subject_id,
                        where + ": relation predicate is empty"});
    }
    if (rel.subject_id == rel.object_id) {
      report.push_back({"self-relation", rel.subject_id,
                        where + ": relation endpoints are equal"});
    }
    if (node_ids.count(rel.subject_id) == 0) {
      report.push_back({"dangling-edge-endpoint", rel.subject_id,
                        where + ": relation subject does not resolve"});
    }
    if (node_ids.count(rel.object_id) == 0) {
      report.push_back({"dangling-edge-endpoint", rel.object_id,
                        where + ": relation object does not resolve"});
    }
  }
}

std::unordered_set<std::string> id_set(const std::vector<ObjectNode>& nodes) {
  std::unordered_set<std::string> ids;
  for (const auto& n : nodes) ids.insert(n.id);
  return ids;
}

}  // namespace

ValidationReport validate_frame(const FrameSceneGraph& fsg) {
  ValidationReport report;
  check_nodes(fsg.nodes, "frame " + fsg.keyframe_id, /*require_anchors=*/false, report);
  check_relations(fsg.relations, id_set(fsg.nodes), "frame " + fsg.keyframe_id, report);
  return report;
}

ValidationReport validate_clip(const ClipGraph& clip) {
  ValidationReport report;
  const std::string where = "clip " + clip.clip_id;
  check_nodes(clip.nodes, where, /*require_anchors=*/true, report);
  auto ids = id_set(clip.nodes);
  check_relations(clip.relations, ids, where, report);

  std::unordered_map<std::string, const ObjectNode*> by_id;
  for (const auto& n : clip.nodes) by_id[n.id] = &n;

  for (const auto& motion : clip.motions) {
    if (!(motion.t1 < motion.t2)) {
      report.push_back({"degenerate-interval", motion.object_id,
                        where + ": motion interval requires t1 < t2"});
    }
    auto it = by_id.find(motion.object_id);
    if (it == by_id.end()) {
      report.push_back({"dangling-edge-endpoint", motion.object_id,
                        where + ": motion object does not resolve"});
    } else if (it->second->mobility != Mobility::Dynamic) {
      report.push_back({"motion-on-static", motion.object_id,
                        where + ": motion edge on a non-dynamic node"});
    }
    if (motion.target_id && by_id.find(*motion.target_id) == by_id.end()) {
      report.push_back({"dangling-edge-endpoint", *motion.target_id,
                        where + ": motion target does not resolve"});
    }
    if (motion.predicate.empty()) {
      report.push_back({"empty-predicate", motion.object_id,
                        where + ": motion predicate is empty"});
    }
  }

  if (clip.event) {
    if (!(clip.event->t_start < clip.event->t_end)) {
      report.push_back({"degenerate-interval", clip.clip_id,
                        where + ": event interval requires t_start < t_end"});
    }
    if (clip.event->t_start < clip.t_start - 1e-9 || clip.event->t_end > clip.t_end + 1e-9) {
      report.push_back({"event-outside-clip", clip.clip_id,
                        where + ": event interval exceeds clip bounds"});
    }
    if (clip.event->description.empty()) {
      report.push_back({"empty-event", clip.clip_id, where + ": event description empty"});
    }
  }

  if (clip.start_frame > clip.end_frame) {
    report.push_back({"bad-frame-range", clip.clip_id,
                      where + ": start_frame exceeds end_frame"});
  }
  return report;
}

ValidationReport validate(const SpatioTemporalSceneGraph& stsg) {
  ValidationReport report;

  std::unordered_set<std::string> clip_ids;
  int prev_end = -1;
  for (const auto& clip : stsg.clips) {
    if (!clip_ids.insert(clip.clip_id).second) {
      report.push_back({"duplicate-clip-id", clip.clip_id, "clip id repeats"});
    }
    if (clip.start_frame < prev_end) {
      report.push_back({"clip-order", clip.clip_id,
                        "clip frame ranges must be ordered and non-overlapping"});
    }
    prev_end = clip.end_frame;
    auto clip_report = validate_clip(clip);
    report.insert(report.end(), clip_report.begin(), clip_report.end());
  }

  for (const auto& ref : stsg.references) {
    if (ref.from.clip_id == ref.to.clip_id) {
      report.push_back({"reference-same-clip", ref.from.node_id,
                        "reference edge must join distinct clips"});
    }
    if (stsg.find_node(ref.from.clip_id, ref.from.node_id) == nullptr) {
      report.push_back({"dangling-edge-endpoint", ref.from.clip_id + "/" + ref.from.node_id,
                        "reference 'from' endpoint does not resolve"});
    }
    if (stsg.find_node(ref.to.clip_id, ref.to.node_id) == nullptr) {
      report.push_back({"dangling-edge-endpoint", ref.to.clip_id + "/" + ref.to.node_id,
                        "reference 'to' endpoint does not resolve"});
    }
  }
  return report;
}

}  // namespace stsg
