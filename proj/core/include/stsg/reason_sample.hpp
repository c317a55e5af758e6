#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stsg/graph.hpp"

namespace stsg {

enum class WalkEdgeKind { Relation, Attribute, Motion, Reference };

std::string walk_edge_kind_name(WalkEdgeKind kind);

// A sampler-visible edge. Attribute entries and targetless motions appear as
// unit-degree pseudo endpoints so questions can land on attributes and
// actions, not just objects.
struct WalkEdge {
  std::string edge_id;  // stable across runs for one graph
  WalkEdgeKind kind;
  std::string node_a;  // owner/subject side, always a real node
  std::string node_b;  // other endpoint; pseudo id when b_is_pseudo
  bool b_is_pseudo = false;
  std::string predicate;   // relation/motion
  std::string attr_kind;   // attribute
  std::string attr_value;  // attribute
  std::string clip_a;
  std::string clip_b;
  double t1 = 0.0;
  double t2 = 0.0;
};

// Walkable adjacency over an immutable STSG. Construction order is canonical
// (clips, then per node attributes, relations, motions, then references), so
// all sampling is reproducible.
class NeighborView {
 public:
  explicit NeighborView(const SpatioTemporalSceneGraph& stsg);

  struct Adjacent {
    std::size_t edge_index;
    std::string other;
  };

  const std::vector<WalkEdge>& edges() const { return edges_; }
  const WalkEdge& edge(std::size_t index) const { return edges_[index]; }
  const std::vector<Adjacent>& neighbors(const std::string& id) const;

  // Display name: node label, attribute value, or motion predicate.
  std::string label_of(const std::string& id) const;
  std::string clip_of(const std::string& id) const;
  const ObjectNode* object(const std::string& id) const;

 private:
  std::vector<WalkEdge> edges_;
  std::unordered_map<std::string, std::vector<Adjacent>> adjacency_;
  std::unordered_map<std::string, std::string> labels_;
  std::unordered_map<std::string, std::string> clips_;
  std::unordered_map<std::string, const ObjectNode*> objects_;
  std::vector<Adjacent> empty_;
};

struct ReasoningStep {
  int step_index = 1;  // 1-based, sampling order; step 1 is the init edge
  std::string edge_id;
  WalkEdgeKind edge_kind = WalkEdgeKind::Relation;
  std::string focus_node;       // question-side node (expanded on steps >= 2)
  std::string introduced_node;  // init answer, or the node entering Q
  bool focus_is_subject = true;  // focus sits on the edge's node_a side
  std::string sub_question;
  std::string sub_answer;

  bool operator==(const ReasoningStep&) const = default;
};

struct TemporalContext {
  std::string description;
  double t_start = 0.0;
  double t_end = 0.0;

  bool operator==(const TemporalContext&) const = default;
};

struct ReasoningPath {
  std::string video_id;
  std::vector<ReasoningStep> steps;
  std::vector<std::vector<std::string>> q_history;  // snapshot after each step
  std::vector<std::vector<std::string>> a_history;
  std::optional<TemporalContext> temporal_context;
  int requested_n = 0;
  int achieved_n = 0;
  bool early_terminated = false;
  std::uint64_t seed = 0;
};

struct OracleOptions {
  std::size_t node_cap = 12;  // real nodes; enumeration refuses above this
  int max_n = 4;
};

// Samples one reasoning path: init places a random connected pair (u in Q,
// v in A), then each expansion moves a random expandable Q member to A and
// introduces one unseen neighbor, until n steps or no frontier remains.
// Deterministic per (stsg, n, seed). Throws "no-edges" when nothing is
// walkable, input error when n < 1.
ReasoningPath sample_path(const SpatioTemporalSceneGraph& stsg, int n, std::uint64_t seed);

// Exhaustive enumeration of every (init, expansion...) choice sequence the
// sampler could make, deduplicated by step sequence. Test oracle; refuses
// graphs over the cap.
std::vector<ReasoningPath> enumerate_paths(const SpatioTemporalSceneGraph& stsg, int n,
                                           const OracleOptions& options = {});

// Grounds the path in the event of the clip owning its initial edge (the
// initial edge's clip wins for cross-clip paths). No-op when that clip is
// eventless. The seed keeps the op signature uniform with the sampler; event
// choice itself is forced by the tie rule.
ReasoningPath contextualize(ReasoningPath path, const SpatioTemporalSceneGraph& stsg,
                            std::uint64_t seed,
                            std::vector<std::string>* warnings = nullptr);

// "edge|focus|introduced;..." signature used for oracle membership checks.
std::string path_signature(const ReasoningPath& path);

// Stable JSON for provenance blocks and byte-level determinism checks.
std::string serialize_path(const ReasoningPath& path);

}  // namespace stsg
