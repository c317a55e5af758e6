#include "stsg/graph_json.hpp"

#include <json.hpp>

#include "stsg/error.hpp"
#include "stsg/version.hpp"

namespace stsg {

namespace {

using Json = nlohmann::ordered_json;

void require_fields(const Json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw Error("unknown-field", "unknown field '" + it.key() + "' in " + where);
    }
  }
  for (const char* k : known) {
    if (!obj.contains(k)) {
      throw Error("missing-field", "missing field '" + std::string(k) + "' in " + where);
    }
  }
}

Json anchor_to_json(const Anchor& a) {
  return Json{{"keyframe_id", a.keyframe_id}, {"timestamp", a.timestamp}};
}

Anchor anchor_from_json(const Json& j) {
  require_fields(j, "anchor", {"keyframe_id", "timestamp"});
  return Anchor{j.at("keyframe_id").get<std::string>(), j.at("timestamp").get<double>()};
}

Json node_to_json(const ObjectNode& n) {
  Json attrs = Json::array();
  for (const auto& a : n.attributes) {
    attrs.push_back(Json{{"kind", a.kind}, {"value", a.value}});
  }
  Json anchors = Json::array();
  for (const auto& a : n.anchors) anchors.push_back(anchor_to_json(a));
  return Json{{"id", n.id},
              {"label", n.label},
              {"instance_index", n.instance_index},
              {"unique_attribute", n.unique_attribute},
              {"mobility", mobility_name(n.mobility)},
              {"attributes", std::move(attrs)},
              {"anchors", std::move(anchors)}};
}

ObjectNode node_from_json(const Json& j) {
  require_fields(j, "node",
                 {"id", "label", "instance_index", "unique_attribute", "mobility",
                  "attributes", "anchors"});
  ObjectNode node;
  node.id = j.at("id").get<std::string>();
  node.label = j.at("label").get<std::string>();
  node.instance_index = j.at("instance_index").get<int>();
  node.unique_attribute = j.at("unique_attribute").get<std::string>();
  node.mobility = mobility_from_name(j.at("mobility").get<std::string>());
  for (const auto& a : j.at("attributes")) {
    require_fields(a, "attribute", {"kind", "value"});
    node.attributes.push_back({a.at("kind").get<std::string>(), a.at("value").get<std::string>()});
  }
  for (const auto& a : j.at("anchors")) node.anchors.push_back(anchor_from_json(a));
  return node;
}

Json relation_to_json(const RelationEdge& r) {
  return Json{{"subject_id", r.subject_id},
              {"object_id", r.object_id},
              {"predicate", r.predicate},
              {"timestamp", r.timestamp},
              {"keyframe_id", r.keyframe_id}};
}

RelationEdge relation_from_json(const Json& j) {
  require_fields(j, "relation",
                 {"subject_id", "object_id", "predicate", "timestamp", "keyframe_id"});
  return RelationEdge{j.at("subject_id").get<std::string>(),
                      j.at("object_id").get<std::string>(),
                      j.at("predicate").get<std::string>(), j.at("timestamp").get<double>(),
                      j.at("keyframe_id").get<std::string>()};
}

Json motion_to_json(const MotionEdge& m) {
  Json j{{"object_id", m.object_id},
         {"predicate", m.predicate},
         {"target_id", nullptr},
         {"interval", Json::array({m.t1, m.t2})}};
  if (m.target_id) j["target_id"] = *m.target_id;
  return j;
}

MotionEdge motion_from_json(const Json& j) {
  require_fields(j, "motion", {"object_id", "predicate", "target_id", "interval"});
  MotionEdge m;
  m.object_id = j.at("object_id").get<std::string>();
  m.predicate = j.at("predicate").get<std::string>();
  if (!j.at("target_id").is_null()) m.target_id = j.at("target_id").get<std::string>();
  const auto& interval = j.at("interval");
  if (!interval.is_array() || interval.size() != 2) {
    throw Error("bad-interval", "motion interval must be [t1, t2]");
  }
  m.t1 = interval[0].get<double>();
  m.t2 = interval[1].get<double>();
  return m;
}

Json event_to_json(const EventEdge& e) {
  return Json{{"clip_id", e.clip_id},
              {"description", e.description},
              {"interval", Json::array({e.t_start, e.t_end})}};
}

EventEdge event_from_json(const Json& j) {
  require_fields(j, "event", {"clip_id", "description", "interval"});
  const auto& interval = j.at("interval");
  if (!interval.is_array() || interval.size() != 2) {
    throw Error("bad-interval", "event interval must be [t_start, t_end]");
  }
  return EventEdge{j.at("clip_id").get<std::string>(),
                   j.at("description").get<std::string>(), interval[0].get<double>(),
                   interval[1].get<double>()};
}

Json clip_to_json(const ClipGraph& c) {
  Json nodes = Json::array();
  for (const auto& n : c.nodes) nodes.push_back(node_to_json(n));
  Json relations = Json::array();
  for (const auto& r : c.relations) relations.push_back(relation_to_json(r));
  Json motions = Json::array();
  for (const auto& m : c.motions) motions.push_back(motion_to_json(m));
  Json j{{"clip_id", c.clip_id},
         {"frame_range", Json::array({c.start_frame, c.end_frame})},
         {"time_range", Json::array({c.t_start, c.t_end})},
         {"nodes", std::move(nodes)},
         {"relations", std::move(relations)},
         {"motions", std::move(motions)},
         {"event", nullptr}};
  if (c.event) j["event"] = event_to_json(*c.event);
  return j;
}

ClipGraph clip_from_json(const Json& j) {
  require_fields(j, "clip",
                 {"clip_id", "frame_range", "time_range", "nodes", "relations", "motions",
                  "event"});
  ClipGraph c;
  c.clip_id = j.at("clip_id").get<std::string>();
  const auto& fr = j.at("frame_range");
  const auto& tr = j.at("time_range");
  if (!fr.is_array() || fr.size() != 2 || !tr.is_array() || tr.size() != 2) {
    throw Error("bad-interval", "frame_range/time_range must have two elements");
  }
  c.start_frame = fr[0].get<int>();
  c.end_frame = fr[1].get<int>();
  c.t_start = tr[0].get<double>();
  c.t_end = tr[1].get<double>();
  for (const auto& n : j.at("nodes")) c.nodes.push_back(node_from_json(n));
  for (const auto& r : j.at("relations")) c.relations.push_back(relation_from_json(r));
  for (const auto& m : j.at("motions")) c.motions.push_back(motion_from_json(m));
  if (!j.at("event").is_null()) c.event = event_from_json(j.at("event"));
  return c;
}

Json reference_to_json(const ReferenceEdge& r) {
  return Json{{"from", Json{{"clip_id", r.from.clip_id}, {"node_id", r.from.node_id}}},
              {"to", Json{{"clip_id", r.to.clip_id}, {"node_id", r.to.node_id}}}};
}

ReferenceEdge reference_from_json(const Json& j) {
  require_fields(j, "reference", {"from", "to"});
  auto parse_ref = [](const Json& r) {
    require_fields(r, "reference endpoint", {"clip_id", "node_id"});
    return NodeRef{r.at("clip_id").get<std::string>(), r.at("node_id").get<std::string>()};
  };
  return ReferenceEdge{parse_ref(j.at("from")), parse_ref(j.at("to"))};
}

Json parse_document(const std::string& bytes) {
  try {
    return Json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("malformed-json", "JSON parse error at byte " + std::to_string(e.byte) +
                                      ": " + e.what());
  }
}

}  // namespace

std::string serialize_stsg(const SpatioTemporalSceneGraph& stsg) {
  auto report = validate(stsg);
  if (!report.empty()) {
    throw Error("invalid-graph", "serialize requires a valid graph; first violation: " +
                                     report.front().code + " (" + report.front().subject +
                                     ")");
  }
  Json clips = Json::array();
  for (const auto& c : stsg.clips) clips.push_back(clip_to_json(c));
  Json refs = Json::array();
  for (const auto& r : stsg.references) refs.push_back(reference_to_json(r));
  Json doc{{"schema_version", kStsgSchemaVersion},
           {"video_id", stsg.video_id},
           {"clips", std::move(clips)},
           {"references", std::move(refs)}};
  return doc.dump(2) + "\n";
}

SpatioTemporalSceneGraph deserialize_stsg(const std::string& bytes) {
  Json doc = parse_document(bytes);
  if (!doc.is_object()) throw Error("malformed-json", "top level must be an object");
  require_fields(doc, "document", {"schema_version", "video_id", "clips", "references"});
  int version = doc.at("schema_version").get<int>();
  if (version != kStsgSchemaVersion) {
    throw Error("schema-version", "unsupported schema_version " + std::to_string(version) +
                                      ", expected " + std::to_string(kStsgSchemaVersion));
  }
  SpatioTemporalSceneGraph stsg;
  stsg.video_id = doc.at("video_id").get<std::string>();
  for (const auto& c : doc.at("clips")) stsg.clips.push_back(clip_from_json(c));
  for (const auto& r : doc.at("references")) stsg.references.push_back(reference_from_json(r));
  return stsg;
}

std::string serialize_frame(const FrameSceneGraph& fsg) {
  Json nodes = Json::array();
  for (const auto& n : fsg.nodes) nodes.push_back(node_to_json(n));
  Json relations = Json::array();
  for (const auto& r : fsg.relations) relations.push_back(relation_to_json(r));
  Json doc{{"schema_version", kStsgSchemaVersion},
           {"keyframe_id", fsg.keyframe_id},
           {"timestamp", fsg.timestamp},
           {"nodes", std::move(nodes)},
           {"relations", std::move(relations)}};
  return doc.dump(2) + "\n";
}

FrameSceneGraph deserialize_frame(const std::string& bytes) {
  Json doc = parse_document(bytes);
  require_fields(doc, "frame document",
                 {"schema_version", "keyframe_id", "timestamp", "nodes", "relations"});
  int version = doc.at("schema_version").get<int>();
  if (version != kStsgSchemaVersion) {
    throw Error("schema-version", "unsupported schema_version " + std::to_string(version));
  }
  FrameSceneGraph fsg;
  fsg.keyframe_id = doc.at("keyframe_id").get<std::string>();
  fsg.timestamp = doc.at("timestamp").get<double>();
  for (const auto& n : doc.at("nodes")) fsg.nodes.push_back(node_from_json(n));
  for (const auto& r : doc.at("relations")) fsg.relations.push_back(relation_from_json(r));
  return fsg;
}

}  // namespace stsg
