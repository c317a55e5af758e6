#include "stsg/graph_induct.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "stsg/error.hpp"
#include "stsg/text.hpp"

namespace stsg {

namespace {

void warn(InductLog* log, const std::string& message) {
  if (log) log->warnings.push_back(message);
}

void record_verdict(InductLog* log, std::string a, std::string b, bool same,
                    VerdictSource source) {
  if (log) log->verdicts.push_back({std::move(a), std::move(b), same, source});
}

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool labels_match(const ObjectNode& a, const ObjectNode& b, double overlap_threshold) {
  if (iequals(a.label, b.label)) return true;
  return token_overlap(a.label, b.label) >= overlap_threshold;
}

std::optional<bool> ask_identity(GatewayClient& client, const std::string& template_id,
                                 const std::string& first, const std::string& second,
                                 const std::string& media_ref, int retries) {
  ModelRequest request = client.make_request(
      template_id, {{"first", first}, {"second", second}}, {media_ref});
  for (int attempt = 0; attempt <= retries; ++attempt) {
    if (attempt > 0) request.prompt_suffix = "\nAnswer strictly in the required format.";
    std::string text;
    try {
      text = client.complete(request).text;
    } catch (const Error&) {
      return std::nullopt;
    }
    try {
      return parse_model_output(PayloadKind::YesNo, text).yes();
    } catch (const ParseError&) {
      if (attempt == retries) return std::nullopt;
    }
  }
  return std::nullopt;
}

const ObjectNode* resolve_in_clip(const std::string& text, const std::vector<ObjectNode>& nodes,
                                  const std::string& exclude_id) {
  const ObjectNode* best = nullptr;
  std::size_t best_score = 0;
  for (const auto& node : nodes) {
    if (node.id == exclude_id) continue;
    if (iequals(node.label, text)) return &node;
    auto label_tokens = tokenize_words(node.label);
    auto text_tokens = tokenize_words(text);
    std::set<std::string> token_set(text_tokens.begin(), text_tokens.end());
    if (label_tokens.empty()) continue;
    bool all = std::all_of(label_tokens.begin(), label_tokens.end(),
                           [&](const std::string& t) { return token_set.count(t) != 0; });
    if (all && label_tokens.size() > best_score) {
      best_score = label_tokens.size();
      best = &node;
    }
  }
  return best;
}

}  // namespace

std::string clip_media_ref(const std::string& video_id, const std::string& clip_id) {
  return video_id + "/" + clip_id;
}

ClipGraph merge_clip(const ClipMeta& meta, const std::vector<FrameSceneGraph>& frames,
                     GatewayClient& client, const InductOptions& options, InductLog* log) {
  ClipGraph clip;
  clip.clip_id = meta.clip_id;
  clip.start_frame = meta.start_frame;
  clip.end_frame = meta.end_frame;
  clip.t_start = meta.t_start;
  clip.t_end = meta.t_end;
  if (frames.empty()) return clip;

  const std::string media_ref = clip_media_ref(meta.video_id, meta.clip_id);

  // Flat index over (frame, node) so chains can span the whole clip.
  struct Slot {
    std::size_t frame;
    const ObjectNode* node;
  };
  std::vector<Slot> slots;
  std::unordered_map<std::string, std::size_t> slot_of;  // "frame_idx|node_id"
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& node : frames[f].nodes) {
      slot_of[std::to_string(f) + "|" + node.id] = slots.size();
      slots.push_back({f, &node});
    }
  }

  UnionFind components(slots.size());
  for (std::size_t f = 0; f + 1 < frames.size(); ++f) {
    for (const auto& a : frames[f].nodes) {
      for (const auto& b : frames[f + 1].nodes) {
        if (!labels_match(a, b, options.label_overlap_threshold)) continue;
        auto verdict = ask_identity(client, "cross_frame_identity", describe_node(a),
                                    describe_node(b), media_ref, options.parse_retries);
        bool same = verdict.value_or(false);
        record_verdict(log, frames[f].keyframe_id + "/" + a.id,
                       frames[f + 1].keyframe_id + "/" + b.id, same,
                       verdict ? VerdictSource::Model : VerdictSource::LabelHeuristic);
        if (!verdict) {
          warn(log, "identity prompt failed for " + a.id + " / " + b.id +
                        ", treating as not-same");
        }
        if (same) {
          components.unite(slot_of[std::to_string(f) + "|" + a.id],
                           slot_of[std::to_string(f + 1) + "|" + b.id]);
        }
      }
    }
  }

  // Gather chains in first-appearance order.
  std::map<std::size_t, std::vector<std::size_t>> chains;  // root -> slot indices
  std::vector<std::size_t> chain_order;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    std::size_t root = components.find(i);
    auto [it, inserted] = chains.try_emplace(root);
    if (inserted) chain_order.push_back(root);
    it->second.push_back(i);
  }

  const std::string scope = meta.video_id + "/" + meta.clip_id;
  std::unordered_map<std::string, std::string> remap;  // "frame|node_id" -> merged id
  std::map<std::string, int> instance_counter;         // per-label clip numbering

  struct PendingMotion {
    std::string node_id;
    std::string label;
    const ObjectNode* first;
    const ObjectNode* last;
    double t1;
    double t2;
  };
  std::vector<PendingMotion> pending_motions;

  for (std::size_t root : chain_order) {
    auto& members = chains[root];
    std::sort(members.begin(), members.end(), [&](std::size_t x, std::size_t y) {
      return slots[x].frame < slots[y].frame;
    });

    const ObjectNode* first = slots[members.front()].node;
    const ObjectNode* last = slots[members.back()].node;

    ObjectNode merged;
    merged.label = first->label;
    merged.instance_index = ++instance_counter[merged.label];
    merged.id = make_node_id(scope, merged.label, merged.instance_index);
    merged.mobility = Mobility::Static;
    for (std::size_t idx : members) {
      if (slots[idx].node->mobility == Mobility::Dynamic) {
        merged.mobility = Mobility::Dynamic;
      }
    }
    for (std::size_t idx : members) {
      const ObjectNode* member = slots[idx].node;
      if (merged.unique_attribute.empty() && !member->unique_attribute.empty()) {
        merged.unique_attribute = member->unique_attribute;
      }
      // Attribute union keeps conflicting values; they are time-stamped by
      // their anchors and temporal change is signal.
      for (const auto& attr : member->attributes) {
        if (std::find(merged.attributes.begin(), merged.attributes.end(), attr) ==
            merged.attributes.end()) {
          merged.attributes.push_back(attr);
        }
      }
      const auto& frame = frames[slots[idx].frame];
      Anchor anchor{frame.keyframe_id, frame.timestamp};
      if (std::find(merged.anchors.begin(), merged.anchors.end(), anchor) ==
          merged.anchors.end()) {
        merged.anchors.push_back(anchor);
      }
      remap[std::to_string(slots[idx].frame) + "|" + member->id] = merged.id;
    }

    if (merged.mobility == Mobility::Dynamic && members.size() >= 2) {
      double t1 = frames[slots[members.front()].frame].timestamp;
      double t2 = frames[slots[members.back()].frame].timestamp;
      if (t1 < t2) {
        pending_motions.push_back({merged.id, merged.label, first, last, t1, t2});
      } else {
        warn(log, "dynamic chain for " + merged.id + " spans no time, skipping motion edge");
      }
    }

    clip.nodes.push_back(std::move(merged));
  }

  // Re-target relations onto merged nodes; now-identical edges deduplicate.
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const auto& rel : frames[f].relations) {
      auto subject = remap.find(std::to_string(f) + "|" + rel.subject_id);
      auto object = remap.find(std::to_string(f) + "|" + rel.object_id);
      if (subject == remap.end() || object == remap.end()) {
        warn(log, "dropping relation with unmapped endpoint in frame " +
                      frames[f].keyframe_id);
        continue;
      }
      if (subject->second == object->second) {
        warn(log, "dropping relation that became a self-loop after merge: " +
                      subject->second);
        continue;
      }
      auto key = std::make_tuple(subject->second, to_lower(rel.predicate), object->second);
      if (!seen.insert(key).second) continue;
      clip.relations.push_back(
          {subject->second, object->second, rel.predicate, rel.timestamp, rel.keyframe_id});
    }
  }

  // Action chain: describe the motion, extract the action, then its
  // predicate/object.
  for (const auto& pending : pending_motions) {
    std::string description;
    try {
      description = client
                        .complete(client.make_request(
                            "action_describe",
                            {{"first", describe_node(*pending.first)},
                             {"second", describe_node(*pending.last)}},
                            {media_ref}))
                        .text;
    } catch (const Error& e) {
      warn(log, "action description failed for " + pending.node_id + ": " + e.code());
      continue;
    }
    std::string sentence = trim(description);
    if (!sentence.empty() && sentence.back() == '.') sentence.pop_back();

    std::optional<std::string> action;
    try {
      auto payload = parse_model_output(
          PayloadKind::Action,
          client
              .complete(client.make_request(
                  "action_extract", {{"sentence", sentence}, {"object", pending.label}}))
              .text);
      action = payload.action();
    } catch (const Error& e) {
      warn(log, "action extraction failed for " + pending.node_id + ": " + e.code());
      continue;
    }

    PredicateObjectPayload po;
    try {
      po = parse_model_output(
               PayloadKind::PredicateObject,
               client.complete(client.make_request("predicate_object_extract",
                                                   {{"action", *action}}))
                   .text)
               .predicate_object();
    } catch (const Error& e) {
      warn(log, "predicate/object extraction failed for " + pending.node_id + ": " +
                    e.code());
      continue;
    }

    MotionEdge motion;
    motion.object_id = pending.node_id;
    motion.predicate = po.predicate;
    motion.t1 = pending.t1;
    motion.t2 = pending.t2;
    if (po.object) {
      const ObjectNode* target = resolve_in_clip(*po.object, clip.nodes, pending.node_id);
      if (target != nullptr) {
        motion.target_id = target->id;
      } else {
        warn(log, "motion target '" + *po.object + "' resolves to no clip node");
      }
    }
    clip.motions.push_back(std::move(motion));
  }

  return clip;
}

SpatioTemporalSceneGraph bridge_clips(const std::string& video_id,
                                      std::vector<ClipGraph> clips, GatewayClient& client,
                                      const InductOptions& options, InductLog* log) {
  SpatioTemporalSceneGraph stsg;
  stsg.video_id = video_id;
  stsg.clips = std::move(clips);
  if (stsg.clips.size() < 2) return stsg;

  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  auto bridge_pair = [&](const ClipGraph& first_clip, const ClipGraph& second_clip) {
    const std::string media_first = clip_media_ref(video_id, first_clip.clip_id);
    const std::string media_second = clip_media_ref(video_id, second_clip.clip_id);
    for (const auto& a : stsg.find_clip(first_clip.clip_id)->nodes) {
      for (const auto& b : second_clip.nodes) {
        if (!labels_match(a, b, options.label_overlap_threshold)) continue;
        ModelRequest request = client.make_request(
            "cross_clip_identity",
            {{"first", describe_node(a)}, {"second", describe_node(b)}},
            {media_first, media_second});
        std::optional<bool> verdict;
        try {
          verdict = parse_model_output(PayloadKind::YesNo, client.complete(request).text)
                        .yes();
        } catch (const Error&) {
          verdict = std::nullopt;
        }
        bool same = verdict.value_or(false);
        record_verdict(log, first_clip.clip_id + "/" + a.id, second_clip.clip_id + "/" + b.id,
                       same, verdict ? VerdictSource::Model : VerdictSource::LabelHeuristic);
        if (!verdict) {
          warn(log, "cross-clip identity prompt failed for " + a.id + " / " + b.id);
        }
        if (!same) continue;
        auto key = std::make_tuple(first_clip.clip_id, a.id, second_clip.clip_id, b.id);
        if (!seen.insert(key).second) continue;
        stsg.references.push_back(
            {{first_clip.clip_id, a.id}, {second_clip.clip_id, b.id}});
      }
    }
  };

  if (options.bridge_all_pairs) {
    for (std::size_t i = 0; i < stsg.clips.size(); ++i) {
      for (std::size_t j = i + 1; j < stsg.clips.size(); ++j) {
        bridge_pair(stsg.clips[i], stsg.clips[j]);
      }
    }
  } else {
    for (std::size_t i = 0; i + 1 < stsg.clips.size(); ++i) {
      bridge_pair(stsg.clips[i], stsg.clips[i + 1]);
    }
  }
  return stsg;
}

ClipGraph attach_event(ClipGraph clip, const std::string& video_id, GatewayClient& client,
                       InductLog* log) {
  if (clip.nodes.empty()) {
    warn(log, "clip " + clip.clip_id + " has no nodes, leaving it eventless");
    return clip;
  }
  try {
    std::string description =
        trim(client
                 .complete(client.make_request("event_describe", {},
                                               {clip_media_ref(video_id, clip.clip_id)}))
                 .text);
    if (description.empty()) {
      warn(log, "empty event description for clip " + clip.clip_id);
      return clip;
    }
    clip.event = EventEdge{clip.clip_id, description, clip.t_start, clip.t_end};
  } catch (const Error& e) {
    warn(log, "event prompt failed for clip " + clip.clip_id + ": " + e.code());
  }
  return clip;
}

}  // namespace stsg
