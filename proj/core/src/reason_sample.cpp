#include "stsg/reason_sample.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_set>

#include "stsg/error.hpp"
#include "stsg/rng.hpp"

namespace stsg {

std::string walk_edge_kind_name(WalkEdgeKind kind) {
  switch (kind) {
    case WalkEdgeKind::Relation: return "relation";
    case WalkEdgeKind::Attribute: return "attribute";
    case WalkEdgeKind::Motion: return "motion";
    case WalkEdgeKind::Reference: return "reference";
  }
  return "unknown";
}

NeighborView::NeighborView(const SpatioTemporalSceneGraph& stsg) {
  auto link = [&](std::size_t edge_index, const std::string& a, const std::string& b) {
    adjacency_[a].push_back({edge_index, b});
    adjacency_[b].push_back({edge_index, a});
  };

  for (const auto& clip : stsg.clips) {
    for (const auto& node : clip.nodes) {
      labels_[node.id] = node.label;
      clips_[node.id] = clip.clip_id;
      objects_[node.id] = &node;
      for (std::size_t k = 0; k < node.attributes.size(); ++k) {
        const auto& attr = node.attributes[k];
        WalkEdge edge;
        edge.edge_id = "attr:" + node.id + "#" + std::to_string(k);
        edge.kind = WalkEdgeKind::Attribute;
        edge.node_a = node.id;
        edge.node_b = edge.edge_id;  // pseudo endpoint shares the edge id
        edge.b_is_pseudo = true;
        edge.attr_kind = attr.kind;
        edge.attr_value = attr.value;
        edge.clip_a = clip.clip_id;
        edge.clip_b = clip.clip_id;
        labels_[edge.node_b] = attr.value;
        clips_[edge.node_b] = clip.clip_id;
        std::size_t index = edges_.size();
        edges_.push_back(std::move(edge));
        link(index, node.id, edges_[index].node_b);
      }
    }
    for (const auto& rel : clip.relations) {
      WalkEdge edge;
      edge.edge_id = "rel:" + rel.subject_id + "|" + rel.predicate + "|" + rel.object_id;
      edge.kind = WalkEdgeKind::Relation;
      edge.node_a = rel.subject_id;
      edge.node_b = rel.object_id;
      edge.predicate = rel.predicate;
      edge.clip_a = clip.clip_id;
      edge.clip_b = clip.clip_id;
      std::size_t index = edges_.size();
      edges_.push_back(std::move(edge));
      link(index, rel.subject_id, rel.object_id);
    }
    for (std::size_t k = 0; k < clip.motions.size(); ++k) {
      const auto& motion = clip.motions[k];
      WalkEdge edge;
      edge.edge_id = "mot:" + clip.clip_id + "#" + std::to_string(k);
      edge.kind = WalkEdgeKind::Motion;
      edge.node_a = motion.object_id;
      edge.predicate = motion.predicate;
      edge.clip_a = clip.clip_id;
      edge.clip_b = clip.clip_id;
      edge.t1 = motion.t1;
      edge.t2 = motion.t2;
      if (motion.target_id) {
        edge.node_b = *motion.target_id;
      } else {
        edge.node_b = edge.edge_id;  // intransitive action: unit-degree endpoint
        edge.b_is_pseudo = true;
        labels_[edge.node_b] = motion.predicate;
        clips_[edge.node_b] = clip.clip_id;
      }
      std::size_t index = edges_.size();
      edges_.push_back(std::move(edge));
      link(index, edges_[index].node_a, edges_[index].node_b);
    }
  }
  for (const auto& ref : stsg.references) {
    WalkEdge edge;
    edge.edge_id = "ref:" + ref.from.clip_id + "/" + ref.from.node_id + "|" +
                   ref.to.clip_id + "/" + ref.to.node_id;
    edge.kind = WalkEdgeKind::Reference;
    edge.node_a = ref.from.node_id;
    edge.node_b = ref.to.node_id;
    edge.clip_a = ref.from.clip_id;
    edge.clip_b = ref.to.clip_id;
    std::size_t index = edges_.size();
    edges_.push_back(std::move(edge));
    link(index, ref.from.node_id, ref.to.node_id);
  }
}

const std::vector<NeighborView::Adjacent>& NeighborView::neighbors(
    const std::string& id) const {
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? empty_ : it->second;
}

std::string NeighborView::label_of(const std::string& id) const {
  auto it = labels_.find(id);
  return it == labels_.end() ? id : it->second;
}

std::string NeighborView::clip_of(const std::string& id) const {
  auto it = clips_.find(id);
  return it == clips_.end() ? std::string{} : it->second;
}

const ObjectNode* NeighborView::object(const std::string& id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : it->second;
}

namespace {

struct Frontier {
  std::vector<std::string> q;
  std::vector<std::string> a;

  bool contains(const std::string& id) const {
    return std::find(q.begin(), q.end(), id) != q.end() ||
           std::find(a.begin(), a.end(), id) != a.end();
  }

  void move_to_answers(const std::string& id) {
    q.erase(std::remove(q.begin(), q.end(), id), q.end());
    a.push_back(id);
  }
};

// Canonical sub-question/answer strings recorded as the path grows; the QRA
// renderer later re-renders steps through its surface-form registry.
void fill_init_text(ReasoningStep& step, const WalkEdge& edge, const NeighborView& view) {
  const std::string u = view.label_of(step.focus_node);
  const std::string v = view.label_of(step.introduced_node);
  switch (step.edge_kind) {
    case WalkEdgeKind::Relation:
      step.sub_question = step.focus_is_subject
                              ? "What is the " + u + " " + edge.predicate + "?"
                              : "What is " + edge.predicate + " the " + u + "?";
      break;
    case WalkEdgeKind::Attribute:
      step.sub_question =
          step.focus_is_subject
              ? "What is the " + edge.attr_kind + " of the " + u + "?"
              : "Which object has " + edge.attr_kind + " " + edge.attr_value + "?";
      break;
    case WalkEdgeKind::Motion:
      if (edge.b_is_pseudo) {
        step.sub_question = step.focus_is_subject
                                ? "What is the " + u + " doing?"
                                : "Which object is " + edge.predicate + "?";
      } else {
        step.sub_question = step.focus_is_subject
                                ? "What is the " + u + " " + edge.predicate + "?"
                                : "What is " + edge.predicate + " the " + u + "?";
      }
      break;
    case WalkEdgeKind::Reference:
      step.sub_question = "Which object in another clip is the same as the " + u + "?";
      break;
  }
  step.sub_answer = v;
}

void fill_expand_text(ReasoningStep& step, const WalkEdge& edge, const NeighborView& view) {
  const std::string q = view.label_of(step.focus_node);
  const std::string w = view.label_of(step.introduced_node);
  switch (step.edge_kind) {
    case WalkEdgeKind::Relation:
      step.sub_question = step.focus_is_subject
                              ? "Who or what is " + edge.predicate + " the " + w + "?"
                              : "Who or what is the " + w + " " + edge.predicate + "?";
      break;
    case WalkEdgeKind::Attribute:
      // The focus owns the attribute; the pseudo endpoint never expands.
      step.sub_question =
          "Which object has " + edge.attr_kind + " " + edge.attr_value + "?";
      break;
    case WalkEdgeKind::Motion:
      if (edge.b_is_pseudo) {
        step.sub_question = "Which object is " + edge.predicate + "?";
      } else {
        step.sub_question = step.focus_is_subject
                                ? "Who or what is " + edge.predicate + " the " + w + "?"
                                : "Who or what is the " + w + " " + edge.predicate + "?";
      }
      break;
    case WalkEdgeKind::Reference:
      step.sub_question = "Which object is the same as the " + w + " from another clip?";
      break;
  }
  step.sub_answer = q;
}

struct ExpansionChoice {
  std::string q;
  std::size_t edge_index;
  std::string w;
};

std::vector<std::string> expandable_members(const Frontier& frontier,
                                            const NeighborView& view) {
  std::vector<std::string> out;
  for (const auto& q : frontier.q) {
    for (const auto& adj : view.neighbors(q)) {
      if (!frontier.contains(adj.other)) {
        out.push_back(q);
        break;
      }
    }
  }
  return out;
}

std::vector<ExpansionChoice> eligible_choices(const std::string& q, const Frontier& frontier,
                                              const NeighborView& view) {
  std::vector<ExpansionChoice> out;
  for (const auto& adj : view.neighbors(q)) {
    if (!frontier.contains(adj.other)) out.push_back({q, adj.edge_index, adj.other});
  }
  return out;
}

ReasoningStep make_init_step(const NeighborView& view, std::size_t edge_index,
                             bool u_is_side_a) {
  const WalkEdge& edge = view.edge(edge_index);
  ReasoningStep step;
  step.step_index = 1;
  step.edge_id = edge.edge_id;
  step.edge_kind = edge.kind;
  step.focus_node = u_is_side_a ? edge.node_a : edge.node_b;
  step.introduced_node = u_is_side_a ? edge.node_b : edge.node_a;
  step.focus_is_subject = u_is_side_a;
  fill_init_text(step, edge, view);
  return step;
}

ReasoningStep make_expand_step(const NeighborView& view, int index,
                               const ExpansionChoice& choice) {
  const WalkEdge& edge = view.edge(choice.edge_index);
  ReasoningStep step;
  step.step_index = index;
  step.edge_id = edge.edge_id;
  step.edge_kind = edge.kind;
  step.focus_node = choice.q;
  step.introduced_node = choice.w;
  step.focus_is_subject = (choice.q == edge.node_a);
  fill_expand_text(step, edge, view);
  return step;
}

void apply_init(Frontier& frontier, const ReasoningStep& step) {
  frontier.q.push_back(step.focus_node);
  frontier.a.push_back(step.introduced_node);
}

void apply_expand(Frontier& frontier, const ReasoningStep& step) {
  frontier.move_to_answers(step.focus_node);
  frontier.q.push_back(step.introduced_node);
}

void snapshot(ReasoningPath& path, const Frontier& frontier) {
  path.q_history.push_back(frontier.q);
  path.a_history.push_back(frontier.a);
}

}  // namespace

ReasoningPath sample_path(const SpatioTemporalSceneGraph& stsg, int n, std::uint64_t seed) {
  if (n < 1) throw InputError("bad-n", "n must be >= 1");
  NeighborView view(stsg);
  if (view.edges().empty()) {
    throw Error("no-edges", "graph has no walkable edges to sample from");
  }

  Rng rng(seed);
  ReasoningPath path;
  path.video_id = stsg.video_id;
  path.requested_n = n;
  path.seed = seed;

  // Init: a uniformly random (edge, orientation) pair; the first endpoint
  // goes to Q, the second is the answer.
  std::size_t pick = rng.next_below(view.edges().size() * 2);
  ReasoningStep init = make_init_step(view, pick / 2, pick % 2 == 0);
  Frontier frontier;
  apply_init(frontier, init);
  path.steps.push_back(std::move(init));
  snapshot(path, frontier);

  while (static_cast<int>(path.steps.size()) < n) {
    auto expandable = expandable_members(frontier, view);
    if (expandable.empty()) break;
    const std::string& q = expandable[rng.next_below(expandable.size())];
    auto choices = eligible_choices(q, frontier, view);
    const ExpansionChoice& choice = choices[rng.next_below(choices.size())];
    ReasoningStep step =
        make_expand_step(view, static_cast<int>(path.steps.size()) + 1, choice);
    apply_expand(frontier, step);
    path.steps.push_back(std::move(step));
    snapshot(path, frontier);
  }

  path.achieved_n = static_cast<int>(path.steps.size());
  path.early_terminated = path.achieved_n < path.requested_n;
  return path;
}

namespace {

void enumerate_rec(const NeighborView& view, int n, ReasoningPath& current,
                   Frontier& frontier, std::vector<ReasoningPath>& out,
                   std::unordered_set<std::string>& seen) {
  if (static_cast<int>(current.steps.size()) == n) {
    ReasoningPath complete = current;
    complete.achieved_n = n;
    complete.early_terminated = false;
    if (seen.insert(path_signature(complete)).second) out.push_back(std::move(complete));
    return;
  }
  auto expandable = expandable_members(frontier, view);
  if (expandable.empty()) {
    ReasoningPath complete = current;
    complete.achieved_n = static_cast<int>(complete.steps.size());
    complete.early_terminated = true;
    if (seen.insert(path_signature(complete)).second) out.push_back(std::move(complete));
    return;
  }
  for (const auto& q : expandable) {
    for (const auto& choice : eligible_choices(q, frontier, view)) {
      ReasoningStep step =
          make_expand_step(view, static_cast<int>(current.steps.size()) + 1, choice);
      Frontier saved = frontier;
      apply_expand(frontier, step);
      current.steps.push_back(step);
      snapshot(current, frontier);
      enumerate_rec(view, n, current, frontier, out, seen);
      current.steps.pop_back();
      current.q_history.pop_back();
      current.a_history.pop_back();
      frontier = std::move(saved);
    }
  }
}

}  // namespace

std::vector<ReasoningPath> enumerate_paths(const SpatioTemporalSceneGraph& stsg, int n,
                                           const OracleOptions& options) {
  if (n < 1) throw InputError("bad-n", "n must be >= 1");
  if (stsg.node_count() > options.node_cap) {
    throw Error("oracle-cap", "enumeration refuses graphs over " +
                                  std::to_string(options.node_cap) + " nodes");
  }
  if (n > options.max_n) {
    throw Error("oracle-cap",
                "enumeration refuses n over " + std::to_string(options.max_n));
  }

  NeighborView view(stsg);
  std::vector<ReasoningPath> out;
  std::unordered_set<std::string> seen;
  for (std::size_t edge_index = 0; edge_index < view.edges().size(); ++edge_index) {
    for (bool u_is_side_a : {true, false}) {
      ReasoningPath current;
      current.video_id = stsg.video_id;
      current.requested_n = n;
      current.seed = 0;
      ReasoningStep init = make_init_step(view, edge_index, u_is_side_a);
      Frontier frontier;
      apply_init(frontier, init);
      current.steps.push_back(std::move(init));
      snapshot(current, frontier);
      enumerate_rec(view, n, current, frontier, out, seen);
    }
  }
  return out;
}

ReasoningPath contextualize(ReasoningPath path, const SpatioTemporalSceneGraph& stsg,
                            std::uint64_t seed, std::vector<std::string>* warnings) {
  (void)seed;  // the owning-clip rule leaves nothing to draw
  if (path.steps.empty()) return path;
  NeighborView view(stsg);
  const std::string clip_id = view.clip_of(path.steps.front().focus_node);
  const ClipGraph* clip = stsg.find_clip(clip_id);
  if (clip == nullptr || !clip->event) {
    if (warnings) {
      warnings->push_back("clip " + clip_id + " is eventless; no temporal context applied");
    }
    return path;
  }
  path.temporal_context =
      TemporalContext{clip->event->description, clip->event->t_start, clip->event->t_end};
  return path;
}

std::string path_signature(const ReasoningPath& path) {
  std::string sig;
  for (const auto& step : path.steps) {
    sig += step.edge_id;
    sig += '|';
    sig += step.focus_node;
    sig += '|';
    sig += step.introduced_node;
    sig += ';';
  }
  return sig;
}

std::string serialize_path(const ReasoningPath& path) {
  nlohmann::ordered_json doc;
  doc["video_id"] = path.video_id;
  doc["seed"] = path.seed;
  doc["requested_n"] = path.requested_n;
  doc["achieved_n"] = path.achieved_n;
  doc["early_terminated"] = path.early_terminated;
  if (path.temporal_context) {
    doc["temporal_context"] = {
        {"description", path.temporal_context->description},
        {"interval",
         nlohmann::ordered_json::array(
             {path.temporal_context->t_start, path.temporal_context->t_end})}};
  } else {
    doc["temporal_context"] = nullptr;
  }
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& step : path.steps) {
    steps.push_back({{"index", step.step_index},
                     {"edge_id", step.edge_id},
                     {"kind", walk_edge_kind_name(step.edge_kind)},
                     {"focus", step.focus_node},
                     {"introduced", step.introduced_node},
                     {"sub_question", step.sub_question},
                     {"sub_answer", step.sub_answer}});
  }
  doc["steps"] = std::move(steps);
  doc["q_history"] = path.q_history;
  doc["a_history"] = path.a_history;
  return doc.dump();
}

}  // namespace stsg
