#include "stsg/semantics_parse.hpp"

#include <json.hpp>

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "stsg/error.hpp"
#include "stsg/text.hpp"

namespace stsg {

namespace {

constexpr const char* kRetrySuffix = "\nAnswer strictly in the required format.";

[[noreturn]] void fail(PayloadKind kind, const std::string& text, const std::string& why) {
  throw ParseError(payload_kind_name(kind), text, why + "; offending text: " +
                                                      text.substr(0, 200));
}

std::vector<std::string> parse_object_list(const std::string& raw) {
  std::string text = trim(normalize_quotes(raw));
  std::string lowered = to_lower(text);
  std::string inner;
  std::size_t prefix = lowered.find("meaningful objects are");
  bool anchored = false;
  if (prefix != std::string::npos) {
    inner = trim(text.substr(prefix + std::string("meaningful objects are").size()));
    anchored = true;
  } else {
    inner = text;
  }
  std::size_t lb = inner.find('[');
  std::size_t rb = inner.rfind(']');
  if (lb != std::string::npos && rb != std::string::npos && rb > lb) {
    inner = inner.substr(lb + 1, rb - lb - 1);
  } else if (!anchored) {
    fail(PayloadKind::ObjectList, raw, "expected 'Meaningful objects are' or a [list]");
  } else {
    // bare "a, b" form
    while (!inner.empty() && inner.back() == '.') inner.pop_back();
  }
  std::vector<std::string> items;
  for (const auto& part : split(inner, ',')) {
    std::string item = trim(part);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

QuantityBlockPayload parse_quantity_block(const std::string& raw) {
  QuantityBlockPayload payload;
  bool have_object = false;
  bool have_quantity = false;
  std::istringstream in(normalize_quotes(raw));
  std::string line;
  static const std::regex instance_re(R"(^\s*(\d+)\.\s*(.*?)\s*:\s*(.*)$)");
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (starts_with_ci(t, "object:")) {
      payload.object = strip_decorations(t.substr(7));
      have_object = true;
      continue;
    }
    if (starts_with_ci(t, "quantity:")) {
      std::string value = strip_decorations(t.substr(9));
      try {
        payload.quantity = std::stoi(value);
      } catch (const std::exception&) {
        fail(PayloadKind::QuantityBlock, raw, "quantity is not an integer");
      }
      have_quantity = true;
      continue;
    }
    std::smatch m;
    if (std::regex_match(t, m, instance_re)) {
      QuantityInstance inst;
      inst.index = std::stoi(m[1].str());
      inst.unique_attribute = strip_decorations(m[3].str());
      payload.instances.push_back(std::move(inst));
    }
  }
  if (!have_object || !have_quantity) {
    fail(PayloadKind::QuantityBlock, raw, "expected 'Object:' and 'Quantity:' lines");
  }
  if (payload.quantity < 1) {
    fail(PayloadKind::QuantityBlock, raw, "quantity must be >= 1");
  }
  return payload;
}

Mobility parse_mobility(const std::string& raw) {
  std::string value = strip_decorations(raw);
  if (iequals(value, "static")) return Mobility::Static;
  if (iequals(value, "dynamic")) return Mobility::Dynamic;
  fail(PayloadKind::Mobility, raw, "expected 'Static' or 'Dynamic'");
}

// Key/value pairs in the pseudo-JSON the extraction prompts demonstrate:
// ["object":"man", "attributes":["clothing":"white shirt", ...]]. Repeated
// keys are the normal case, so this is scanned rather than JSON-parsed.
std::vector<std::pair<std::string, std::string>> scan_quoted_pairs(const std::string& text) {
  static const std::regex pair_re(R"re("([^"]*)"\s*:\s*"([^"]*)")re");
  std::vector<std::pair<std::string, std::string>> pairs;
  auto begin = std::sregex_iterator(text.begin(), text.end(), pair_re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    pairs.emplace_back((*it)[1].str(), (*it)[2].str());
  }
  return pairs;
}

AttributeMapPayload parse_attribute_map(const std::string& raw) {
  std::string text = normalize_quotes(raw);
  AttributeMapPayload payload;
  bool saw_object_key = false;
  for (auto& [key, value] : scan_quoted_pairs(text)) {
    if (iequals(key, "object")) {
      if (!saw_object_key) {
        payload.object = value;
        saw_object_key = true;
      }
      continue;
    }
    if (trim(key).empty() || trim(value).empty()) continue;
    payload.attributes.push_back({to_lower(trim(key)), trim(value)});
  }
  if (!saw_object_key && payload.attributes.empty()) {
    fail(PayloadKind::AttributeMap, raw, "no \"object\" key or attribute pairs found");
  }
  return payload;
}

std::vector<Triplet> parse_triplet_list(const std::string& raw) {
  std::string text = normalize_quotes(raw);
  std::vector<Triplet> triplets;
  std::size_t pos = 0;
  while (true) {
    std::size_t lb = text.find('<', pos);
    if (lb == std::string::npos) break;
    std::size_t rb = text.find('>', lb + 1);
    if (rb == std::string::npos) {
      fail(PayloadKind::TripletList, raw, "unterminated '<' group");
    }
    std::string body = text.substr(lb + 1, rb - lb - 1);
    auto parts = split(body, ',');
    if (parts.size() != 3) {
      fail(PayloadKind::TripletList, raw,
           "triplet must contain exactly two commas: <" + body + ">");
    }
    triplets.push_back({trim(parts[0]), trim(parts[1]), trim(parts[2])});
    pos = rb + 1;
  }
  if (triplets.empty()) {
    fail(PayloadKind::TripletList, raw, "no <subject, predicate, object> groups found");
  }
  return triplets;
}

std::string parse_action(const std::string& raw) {
  std::string text = normalize_quotes(raw);
  for (auto& [key, value] : scan_quoted_pairs(text)) {
    if (iequals(key, "action") && !trim(value).empty()) return trim(value);
  }
  fail(PayloadKind::Action, raw, "no \"action\" entry found");
}

PredicateObjectPayload parse_predicate_object(const std::string& raw) {
  std::string text = normalize_quotes(raw);
  PredicateObjectPayload payload;
  bool have_predicate = false;
  for (auto& [key, value] : scan_quoted_pairs(text)) {
    if (iequals(key, "predicate") && !have_predicate) {
      payload.predicate = trim(value);
      have_predicate = true;
    } else if (iequals(key, "object") && !payload.object) {
      std::string v = trim(value);
      if (!v.empty() && !iequals(v, "none")) payload.object = v;
    }
  }
  if (!have_predicate || payload.predicate.empty()) {
    fail(PayloadKind::PredicateObject, raw, "no \"predicate\" entry found");
  }
  return payload;
}

bool parse_yes_no(const std::string& raw) {
  std::string value = strip_decorations(raw);
  if (iequals(value, "yes")) return true;
  if (iequals(value, "no")) return false;
  fail(PayloadKind::YesNo, raw, "expected 'Yes' or 'No'");
}

RefinedQraPayload parse_refined_qra(const std::string& raw) {
  // The refinement reply may pad prose around the JSON; take the first
  // balanced object.
  std::size_t start = raw.find('{');
  if (start == std::string::npos) {
    fail(PayloadKind::RefinedQRA, raw, "no JSON object found");
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  std::size_t end = std::string::npos;
  for (std::size_t i = start; i < raw.size(); ++i) {
    char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        end = i;
        break;
      }
    }
  }
  if (end == std::string::npos) {
    fail(PayloadKind::RefinedQRA, raw, "unbalanced JSON object");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw.substr(start, end - start + 1));
  } catch (const nlohmann::json::parse_error& e) {
    fail(PayloadKind::RefinedQRA, raw, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.contains("Q") || !doc.contains("R") || !doc.contains("A") ||
      !doc.at("Q").is_string() || !doc.at("R").is_string() || !doc.at("A").is_string()) {
    fail(PayloadKind::RefinedQRA, raw, "JSON must carry string fields Q, R, A");
  }
  return RefinedQraPayload{doc.at("Q").get<std::string>(), doc.at("R").get<std::string>(),
                           doc.at("A").get<std::string>()};
}

// Binding used wherever a template embeds a sentence between its own
// punctuation: one trailing period is dropped.
std::string bind_sentence(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.back() == '.') t.pop_back();
  return trim(t);
}

}  // namespace

std::string payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::ObjectList: return "ObjectList";
    case PayloadKind::QuantityBlock: return "QuantityBlock";
    case PayloadKind::Mobility: return "Mobility";
    case PayloadKind::AttributeMap: return "AttributeMap";
    case PayloadKind::TripletList: return "TripletList";
    case PayloadKind::Action: return "Action";
    case PayloadKind::PredicateObject: return "PredicateObject";
    case PayloadKind::YesNo: return "YesNo";
    case PayloadKind::RefinedQRA: return "RefinedQRA";
  }
  return "unknown";
}

const std::vector<std::string>& ParsedPayload::object_list() const {
  return std::get<std::vector<std::string>>(value);
}
const QuantityBlockPayload& ParsedPayload::quantity_block() const {
  return std::get<QuantityBlockPayload>(value);
}
Mobility ParsedPayload::mobility() const { return std::get<Mobility>(value); }
const AttributeMapPayload& ParsedPayload::attribute_map() const {
  return std::get<AttributeMapPayload>(value);
}
const std::vector<Triplet>& ParsedPayload::triplets() const {
  return std::get<std::vector<Triplet>>(value);
}
const std::string& ParsedPayload::action() const { return std::get<std::string>(value); }
const PredicateObjectPayload& ParsedPayload::predicate_object() const {
  return std::get<PredicateObjectPayload>(value);
}
bool ParsedPayload::yes() const { return std::get<bool>(value); }
const RefinedQraPayload& ParsedPayload::refined_qra() const {
  return std::get<RefinedQraPayload>(value);
}

ParsedPayload parse_model_output(PayloadKind kind, const std::string& text) {
  ParsedPayload payload;
  payload.kind = kind;
  switch (kind) {
    case PayloadKind::ObjectList: payload.value = parse_object_list(text); break;
    case PayloadKind::QuantityBlock: payload.value = parse_quantity_block(text); break;
    case PayloadKind::Mobility: payload.value = parse_mobility(text); break;
    case PayloadKind::AttributeMap: payload.value = parse_attribute_map(text); break;
    case PayloadKind::TripletList: payload.value = parse_triplet_list(text); break;
    case PayloadKind::Action: payload.value = parse_action(text); break;
    case PayloadKind::PredicateObject: payload.value = parse_predicate_object(text); break;
    case PayloadKind::YesNo: payload.value = parse_yes_no(text); break;
    case PayloadKind::RefinedQRA: payload.value = parse_refined_qra(text); break;
  }
  return payload;
}

std::string describe_node(const ObjectNode& node) {
  if (!node.unique_attribute.empty()) return node.label + " " + node.unique_attribute;
  for (const auto& attr : node.attributes) {
    if (attr.kind == "status" || attr.kind == "action") {
      return node.label + " " + attr.value;
    }
  }
  return node.label;
}

namespace {

void warn(FrameBuildLog* log, const std::string& message) {
  if (log) log->warnings.push_back(message);
}

// One model call parsed under `kind`; on grammar mismatch, re-asks up to
// `retries` times with the strict-format suffix, then gives up.
std::optional<ParsedPayload> ask_parsed(GatewayClient& client, ModelRequest request,
                                        PayloadKind kind, int retries, FrameBuildLog* log) {
  for (int attempt = 0; attempt <= retries; ++attempt) {
    if (attempt > 0) request.prompt_suffix = kRetrySuffix;
    std::string text;
    try {
      text = client.complete(request).text;
    } catch (const Error& e) {
      warn(log, "gateway failure on " + request.template_id + ": " + e.code());
      return std::nullopt;
    }
    try {
      return parse_model_output(kind, text);
    } catch (const ParseError& e) {
      if (attempt == retries) {
        warn(log, "parse failure on " + request.template_id + ": " + e.code());
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> ask_text(GatewayClient& client, const ModelRequest& request,
                                    FrameBuildLog* log) {
  try {
    return client.complete(request).text;
  } catch (const Error& e) {
    warn(log, "gateway failure on " + request.template_id + ": " + e.code());
    return std::nullopt;
  }
}

// Resolves free-text from a triplet against frame nodes: exact label match
// first, then the node whose label tokens are all contained in the text
// (longest label wins, earlier node breaks ties).
const ObjectNode* resolve_label(const std::string& text,
                                const std::vector<ObjectNode>& nodes,
                                const ObjectNode* exclude) {
  auto text_tokens = tokenize_words(text);
  std::unordered_set<std::string> token_set(text_tokens.begin(), text_tokens.end());
  const ObjectNode* best = nullptr;
  std::size_t best_score = 0;
  for (const auto& node : nodes) {
    if (&node == exclude) continue;
    if (iequals(node.label, text)) return &node;
    auto label_tokens = tokenize_words(node.label);
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

FrameSceneGraph build_frame_graph(const KeyframeRef& ref, GatewayClient& client,
                                  const ParseOptions& options, FrameBuildLog* log,
                                  bool strict) {
  FrameSceneGraph fsg;
  fsg.keyframe_id = ref.keyframe_id;
  fsg.timestamp = ref.timestamp;
  const std::string scope = ref.video_id + "/" + ref.keyframe_id;

  auto required_failed = [&](const std::string& step) -> FrameSceneGraph {
    if (strict) {
      throw Error("frame-failed", "required step '" + step + "' failed for keyframe " +
                                      ref.keyframe_id);
    }
    if (log) log->failed = true;
    warn(log, "frame " + ref.keyframe_id + " failed at required step " + step);
    return FrameSceneGraph{ref.keyframe_id, ref.timestamp, {}, {}};
  };

  auto narrative =
      ask_text(client, client.make_request("scene_narrative", {}, {ref.image_ref}), log);
  if (!narrative) return required_failed("scene_narrative");

  auto object_payload = ask_parsed(
      client,
      client.make_request("object_extract", {{"sentence", bind_sentence(*narrative)}}),
      PayloadKind::ObjectList, options.parse_retries, log);
  if (!object_payload) return required_failed("object_extract");

  std::vector<std::string> labels;
  for (const auto& raw : object_payload->object_list()) {
    std::string label = trim(raw);
    if (label.empty()) continue;
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
      labels.push_back(label);
    }
  }
  if (labels.empty()) {
    warn(log, "frame " + ref.keyframe_id + ": narrative yielded an empty object list");
    return fsg;
  }

  for (const auto& label : labels) {
    int quantity = 1;
    std::vector<QuantityInstance> instances;
    auto quantity_payload = ask_parsed(
        client, client.make_request("quantity_unique", {{"object", label}}, {ref.image_ref}),
        PayloadKind::QuantityBlock, options.parse_retries, log);
    if (quantity_payload) {
      quantity = quantity_payload->quantity_block().quantity;
      instances = quantity_payload->quantity_block().instances;
    } else {
      warn(log, "assuming a single instance of '" + label + "'");
    }

    Mobility mobility = Mobility::Static;
    auto mobility_payload = ask_parsed(
        client, client.make_request("mobility", {{"object", label}}, {ref.clip_ref}),
        PayloadKind::Mobility, options.parse_retries, log);
    if (mobility_payload) {
      mobility = mobility_payload->mobility();
    } else {
      warn(log, "mobility undetermined for '" + label + "', defaulting to Static");
    }

    std::vector<AttributeEntry> attributes;
    auto attr_narrative = ask_text(
        client,
        client.make_request("attribute_narrative", {{"object", label}}, {ref.image_ref}),
        log);
    if (attr_narrative) {
      auto attr_payload = ask_parsed(
          client,
          client.make_request(
              "attribute_extract",
              {{"sentence", bind_sentence(*attr_narrative)}, {"object", label}}),
          PayloadKind::AttributeMap, options.parse_retries, log);
      if (attr_payload) attributes = attr_payload->attribute_map().attributes;
    }

    for (int i = 1; i <= quantity; ++i) {
      ObjectNode node;
      node.id = make_node_id(scope, label, i);
      node.label = label;
      node.instance_index = i;
      node.mobility = mobility;
      node.attributes = attributes;
      node.anchors.push_back({ref.keyframe_id, ref.timestamp});
      for (const auto& inst : instances) {
        if (inst.index == i) node.unique_attribute = inst.unique_attribute;
      }
      fsg.nodes.push_back(std::move(node));
    }
  }

  // Relation prompts fix the subject; every prompt covers the ordered pairs
  // (subject, each other node) and the cap bounds the frame total.
  int pair_budget = options.relation_pair_cap;
  std::set<std::tuple<std::string, std::string, std::string>> seen_edges;
  for (const auto& subject : fsg.nodes) {
    std::vector<std::string> other_descriptors;
    for (const auto& other : fsg.nodes) {
      if (other.id != subject.id) other_descriptors.push_back(describe_node(other));
    }
    if (other_descriptors.empty()) break;
    if (pair_budget < static_cast<int>(other_descriptors.size())) {
      warn(log, "relation pair cap reached in frame " + ref.keyframe_id);
      break;
    }
    pair_budget -= static_cast<int>(other_descriptors.size());

    std::string others_text;
    for (std::size_t i = 0; i < other_descriptors.size(); ++i) {
      if (i > 0) others_text += ", ";
      others_text += other_descriptors[i];
    }
    const std::string subject_desc = describe_node(subject);
    auto relation_narrative =
        ask_text(client,
                 client.make_request("relation_narrative",
                                     {{"object", subject_desc}, {"others", others_text}},
                                     {ref.image_ref}),
                 log);
    if (!relation_narrative) continue;

    auto triplet_payload = ask_parsed(
        client,
        client.make_request(
            "triplet_extract",
            {{"sentence", bind_sentence(*relation_narrative)}, {"object", subject_desc}}),
        PayloadKind::TripletList, options.parse_retries, log);
    if (!triplet_payload) continue;

    for (const auto& triplet : triplet_payload->triplets()) {
      if (token_overlap(triplet.subject, subject.label) == 0.0) {
        warn(log, "dropping triplet with foreign subject '" + triplet.subject + "'");
        continue;
      }
      const ObjectNode* object_node = resolve_label(triplet.object, fsg.nodes, &subject);
      if (object_node == nullptr) {
        warn(log, "triplet object '" + triplet.object + "' resolves to no node");
        continue;
      }
      auto key =
          std::make_tuple(subject.id, to_lower(trim(triplet.predicate)), object_node->id);
      if (!seen_edges.insert(key).second) continue;
      fsg.relations.push_back({subject.id, object_node->id, trim(triplet.predicate),
                               ref.timestamp, ref.keyframe_id});
    }
  }

  return fsg;
}

FrameSceneGraph verify_nodes(const FrameSceneGraph& fsg, const KeyframeRef& ref,
                             GatewayClient& client, const ParseOptions& options,
                             FrameBuildLog* log) {
  std::unordered_set<std::string> removed_nodes;
  for (const char* pass : {"verify_node_first", "verify_node_second"}) {
    for (const auto& node : fsg.nodes) {
      if (removed_nodes.count(node.id) != 0) continue;
      auto verdict = ask_parsed(
          client,
          client.make_request(pass, {{"descriptor", describe_node(node)}}, {ref.image_ref}),
          PayloadKind::YesNo, options.parse_retries, log);
      if (!verdict) {
        warn(log, "unverified:" + node.id);
        continue;  // failures keep the element
      }
      if (!verdict->yes()) removed_nodes.insert(node.id);
    }
  }

  std::set<std::size_t> removed_relations;
  if (options.verify_edges) {
    for (const char* pass : {"verify_relation_first", "verify_relation_second"}) {
      for (std::size_t i = 0; i < fsg.relations.size(); ++i) {
        if (removed_relations.count(i) != 0) continue;
        const auto& rel = fsg.relations[i];
        const ObjectNode* subject = fsg.find_node(rel.subject_id);
        const ObjectNode* object = fsg.find_node(rel.object_id);
        if (subject == nullptr || object == nullptr) continue;
        std::string statement =
            "the " + subject->label + " " + rel.predicate + " the " + object->label;
        auto verdict = ask_parsed(
            client, client.make_request(pass, {{"statement", statement}}, {ref.image_ref}),
            PayloadKind::YesNo, options.parse_retries, log);
        if (!verdict) {
          warn(log, "unverified:relation:" + rel.subject_id + "->" + rel.object_id);
          continue;
        }
        if (!verdict->yes()) removed_relations.insert(i);
      }
    }
  }

  FrameSceneGraph out;
  out.keyframe_id = fsg.keyframe_id;
  out.timestamp = fsg.timestamp;
  for (const auto& node : fsg.nodes) {
    if (removed_nodes.count(node.id) == 0) out.nodes.push_back(node);
  }
  for (std::size_t i = 0; i < fsg.relations.size(); ++i) {
    const auto& rel = fsg.relations[i];
    if (removed_relations.count(i) != 0) continue;
    if (removed_nodes.count(rel.subject_id) != 0 || removed_nodes.count(rel.object_id) != 0) {
      continue;
    }
    out.relations.push_back(rel);
  }
  return out;
}

}  // namespace stsg
