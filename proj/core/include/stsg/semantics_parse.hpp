#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stsg/gateway.hpp"
#include "stsg/graph.hpp"

namespace stsg {

enum class PayloadKind {
  ObjectList,
  QuantityBlock,
  Mobility,
  AttributeMap,
  TripletList,
  Action,
  PredicateObject,
  YesNo,
  RefinedQRA,
};

std::string payload_kind_name(PayloadKind kind);

struct QuantityInstance {
  int index = 1;
  std::string unique_attribute;

  bool operator==(const QuantityInstance&) const = default;
};

struct QuantityBlockPayload {
  std::string object;
  int quantity = 1;
  std::vector<QuantityInstance> instances;

  bool operator==(const QuantityBlockPayload&) const = default;
};

struct Triplet {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const Triplet&) const = default;
};

struct AttributeMapPayload {
  std::string object;
  std::vector<AttributeEntry> attributes;  // duplicate kinds preserved, in order

  bool operator==(const AttributeMapPayload&) const = default;
};

struct PredicateObjectPayload {
  std::string predicate;
  std::optional<std::string> object;  // absent when the action is intransitive

  bool operator==(const PredicateObjectPayload&) const = default;
};

struct RefinedQraPayload {
  std::string question;
  std::string rationale;
  std::string answer;

  bool operator==(const RefinedQraPayload&) const = default;
};

struct ParsedPayload {
  PayloadKind kind;
  std::variant<std::vector<std::string>,  // ObjectList
               QuantityBlockPayload,      // QuantityBlock
               Mobility,                  // Mobility
               AttributeMapPayload,       // AttributeMap
               std::vector<Triplet>,      // TripletList
               std::string,               // Action
               PredicateObjectPayload,    // PredicateObject
               bool,                      // YesNo
               RefinedQraPayload>         // RefinedQRA
      value;

  const std::vector<std::string>& object_list() const;
  const QuantityBlockPayload& quantity_block() const;
  Mobility mobility() const;
  const AttributeMapPayload& attribute_map() const;
  const std::vector<Triplet>& triplets() const;
  const std::string& action() const;
  const PredicateObjectPayload& predicate_object() const;
  bool yes() const;
  const RefinedQraPayload& refined_qra() const;
};

// Extracts the structured payload from semi-structured model text.
// Whitespace-tolerant, case-insensitive on keywords, case-preserving on
// values; curly quotes are normalized. Throws ParseError on grammar mismatch.
ParsedPayload parse_model_output(PayloadKind kind, const std::string& text);

struct KeyframeRef {
  std::string video_id;
  std::string clip_id;
  std::string keyframe_id;
  double timestamp = 0.0;
  std::string image_ref;  // media identifier handed to the gateway
  std::string clip_ref;   // identifier of the owning clip video
};

struct ParseOptions {
  int parse_retries = 1;        // re-asks with a strict-format suffix
  int relation_pair_cap = 20;   // ordered subject/object pairs prompted per frame
  bool verify_edges = true;     // dual verification covers relations too
};

struct FrameBuildLog {
  bool failed = false;
  std::vector<std::string> warnings;
};

// How a node is referred to inside prompts: label plus its most
// distinguishing detail (unique attribute, else a status/action attribute).
std::string describe_node(const ObjectNode& node);

// Runs the per-keyframe parsing sequence (scene narrative, object list,
// quantity/unique attribute, mobility, attribute narrative and extraction,
// per-subject relation narrative and triplet extraction) and assembles a
// validated FrameSceneGraph. Required-step failures mark the frame failed and
// yield an empty graph unless `strict`, in which case the error propagates.
FrameSceneGraph build_frame_graph(const KeyframeRef& ref, GatewayClient& client,
                                  const ParseOptions& options = {},
                                  FrameBuildLog* log = nullptr, bool strict = false);

// Dual verification: every node (and relation, unless disabled) is confirmed
// twice with independent phrasings; anything denied in either pass is removed,
// and removing a node removes its incident relations. Gateway failures keep
// the element and flag it unverified.
FrameSceneGraph verify_nodes(const FrameSceneGraph& fsg, const KeyframeRef& ref,
                             GatewayClient& client, const ParseOptions& options = {},
                             FrameBuildLog* log = nullptr);

}  // namespace stsg
