#include "stsg/qra_synth.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>

#include "stsg/error.hpp"
#include "stsg/rng.hpp"
#include "stsg/semantics_parse.hpp"
#include "stsg/text.hpp"

namespace stsg {

std::string template_kind_name(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::Relation: return "relation";
    case TemplateKind::Attribute: return "attribute";
    case TemplateKind::Motion: return "motion";
    case TemplateKind::MotionUnit: return "motion_unit";
    case TemplateKind::Reference: return "reference";
    case TemplateKind::Event: return "event";
  }
  return "unknown";
}

namespace {

std::pair<int, int> key_of(TemplateKind kind, AnswerSlot slot) {
  return {static_cast<int>(kind), static_cast<int>(slot)};
}

TemplateKind kind_from_name(const std::string& name) {
  if (name == "relation") return TemplateKind::Relation;
  if (name == "attribute") return TemplateKind::Attribute;
  if (name == "motion") return TemplateKind::Motion;
  if (name == "motion_unit") return TemplateKind::MotionUnit;
  if (name == "reference") return TemplateKind::Reference;
  if (name == "event") return TemplateKind::Event;
  throw InputError("bad-template-kind", "unknown question template kind: " + name);
}

}  // namespace

void QuestionRegistry::add_form(TemplateKind kind, AnswerSlot slot, std::string form) {
  forms_[key_of(kind, slot)].push_back(std::move(form));
}

const std::vector<std::string>& QuestionRegistry::forms(TemplateKind kind,
                                                        AnswerSlot slot) const {
  auto it = forms_.find(key_of(kind, slot));
  if (it == forms_.end() || it->second.empty()) {
    throw Error("missing-question-template",
                "no surface form registered for " + template_kind_name(kind));
  }
  return it->second;
}

bool QuestionRegistry::complete() const {
  for (TemplateKind kind :
       {TemplateKind::Relation, TemplateKind::Attribute, TemplateKind::Motion,
        TemplateKind::MotionUnit, TemplateKind::Reference, TemplateKind::Event}) {
    for (AnswerSlot slot : {AnswerSlot::EndpointA, AnswerSlot::EndpointB}) {
      auto it = forms_.find(key_of(kind, slot));
      if (it == forms_.end() || it->second.empty()) return false;
    }
  }
  return true;
}

QuestionRegistry QuestionRegistry::builtin() {
  QuestionRegistry r;
  const auto B = AnswerSlot::EndpointB;
  const auto A = AnswerSlot::EndpointA;

  r.add_form(TemplateKind::Relation, B, "Who or what is {subject} {predicate}?");
  r.add_form(TemplateKind::Relation, B, "What is {subject} {predicate}?");
  r.add_form(TemplateKind::Relation, B, "Tell me who or what {subject} is {predicate}.");
  r.add_form(TemplateKind::Relation, A, "Who or what is {predicate} {object}?");
  r.add_form(TemplateKind::Relation, A, "What is {predicate} {object}?");
  r.add_form(TemplateKind::Relation, A, "Name the one {predicate} {object}.");

  r.add_form(TemplateKind::Attribute, B, "What is the {kind} of {subject}?");
  r.add_form(TemplateKind::Attribute, B, "Describe the {kind} of {subject}.");
  r.add_form(TemplateKind::Attribute, B, "What {kind} does {subject} have?");
  r.add_form(TemplateKind::Attribute, A, "Which object has {kind} {value}?");
  r.add_form(TemplateKind::Attribute, A, "What has {kind} {value}?");
  r.add_form(TemplateKind::Attribute, A, "Name the object whose {kind} is {value}.");

  r.add_form(TemplateKind::Motion, B, "Who or what is {subject} {predicate}?");
  r.add_form(TemplateKind::Motion, B, "What is {subject} {predicate}?");
  r.add_form(TemplateKind::Motion, B, "Tell me who or what {subject} is {predicate}.");
  r.add_form(TemplateKind::Motion, A, "Who or what is {predicate} {object}?");
  r.add_form(TemplateKind::Motion, A, "What is {predicate} {object}?");
  r.add_form(TemplateKind::Motion, A, "Name the one {predicate} {object}.");

  r.add_form(TemplateKind::MotionUnit, B, "What is {subject} doing?");
  r.add_form(TemplateKind::MotionUnit, B, "What action is {subject} performing?");
  r.add_form(TemplateKind::MotionUnit, B, "Describe what {subject} is doing.");
  r.add_form(TemplateKind::MotionUnit, A, "Which object is {predicate}?");
  r.add_form(TemplateKind::MotionUnit, A, "Who or what is {predicate}?");
  r.add_form(TemplateKind::MotionUnit, A, "Name the object that is {predicate}.");

  r.add_form(TemplateKind::Reference, B,
             "Which object seen in another clip is the same as {subject}?");
  r.add_form(TemplateKind::Reference, B,
             "What object from a different clip matches {subject}?");
  r.add_form(TemplateKind::Reference, B,
             "Identify the object in another clip identical to {subject}.");
  r.add_form(TemplateKind::Reference, A,
             "Which object seen in another clip is the same as {other}?");
  r.add_form(TemplateKind::Reference, A,
             "What object from a different clip matches {other}?");
  r.add_form(TemplateKind::Reference, A,
             "Identify the object in another clip identical to {other}.");

  r.add_form(TemplateKind::Event, B, "What happens between {t1}s and {t2}s?");
  r.add_form(TemplateKind::Event, B, "Describe the event between {t1}s and {t2}s.");
  r.add_form(TemplateKind::Event, B, "What takes place between {t1}s and {t2}s?");
  r.add_form(TemplateKind::Event, A, "When does \"{description}\" happen?");
  r.add_form(TemplateKind::Event, A, "During which interval does \"{description}\" occur?");
  r.add_form(TemplateKind::Event, A, "Give the time range of \"{description}\".");

  return r;
}

QuestionRegistry QuestionRegistry::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("io:open", "cannot open question registry: " + path.string());
  std::string line;
  if (!std::getline(in, line) || !starts_with_ci(trim(line), "version")) {
    throw InputError("bad-registry", "registry file must start with a version line");
  }
  QuestionRegistry r;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split(t, '|');
    if (fields.size() != 3) {
      throw InputError("bad-registry", "registry line " + std::to_string(line_no) +
                                           " must be kind|slot|form");
    }
    AnswerSlot slot;
    if (fields[1] == "a") {
      slot = AnswerSlot::EndpointA;
    } else if (fields[1] == "b") {
      slot = AnswerSlot::EndpointB;
    } else {
      throw InputError("bad-registry", "registry slot must be 'a' or 'b'");
    }
    r.add_form(kind_from_name(fields[0]), slot, fields[2]);
  }
  return r;
}

namespace {

TemplateKind template_kind_for(const WalkEdge& edge) {
  switch (edge.kind) {
    case WalkEdgeKind::Relation: return TemplateKind::Relation;
    case WalkEdgeKind::Attribute: return TemplateKind::Attribute;
    case WalkEdgeKind::Motion:
      return edge.b_is_pseudo ? TemplateKind::MotionUnit : TemplateKind::Motion;
    case WalkEdgeKind::Reference: return TemplateKind::Reference;
  }
  return TemplateKind::Relation;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct RenderContext {
  const NeighborView& view;
  const ReasoningPath& path;
  std::map<std::string, std::size_t> expanded_at;  // node -> step index (>= 2)
  std::map<std::string, int> label_counts;

  const WalkEdge* edge_of(const ReasoningStep& step) const {
    for (const auto& edge : view.edges()) {
      if (edge.edge_id == step.edge_id) return &edge;
    }
    return nullptr;
  }

  // Direct mention of a node, disambiguated when the label repeats.
  std::string direct_mention(const std::string& node_id) const {
    const ObjectNode* node = view.object(node_id);
    if (node == nullptr) return view.label_of(node_id);
    auto it = label_counts.find(node->label);
    if (it != label_counts.end() && it->second > 1 && !node->unique_attribute.empty()) {
      return "the " + node->label + " " + node->unique_attribute;
    }
    return "the " + node->label;
  }

  // Mention of a node inside the question: expanded nodes are replaced by
  // their relational description through the edge that expanded them.
  std::string mention(const std::string& node_id) const {
    auto it = expanded_at.find(node_id);
    if (it == expanded_at.end()) return direct_mention(node_id);
    const ReasoningStep& step = path.steps[it->second];
    const WalkEdge* edge = edge_of(step);
    if (edge == nullptr) return direct_mention(node_id);
    const std::string inner = mention(step.introduced_node);
    switch (edge->kind) {
      case WalkEdgeKind::Relation:
        return step.focus_is_subject
                   ? "the one " + edge->predicate + " " + inner
                   : "the one that " + inner + " is " + edge->predicate;
      case WalkEdgeKind::Attribute:
        return "the one whose " + edge->attr_kind + " is " + edge->attr_value;
      case WalkEdgeKind::Motion:
        if (edge->b_is_pseudo) return "the one that is " + edge->predicate;
        return step.focus_is_subject
                   ? "the one " + edge->predicate + " " + inner
                   : "the one that " + inner + " is " + edge->predicate;
      case WalkEdgeKind::Reference:
        return "the one that is the same as " + inner + " in another clip";
    }
    return direct_mention(node_id);
  }
};

std::string render_surface(const std::string& form,
                           const std::map<std::string, std::string>& bindings) {
  return render_template_text(form, bindings);
}

// Rationale line for one step, in plain labels; the step ordering gives the
// resolution sequence so labels are already identified when a line uses them.
std::string rationale_line(const RenderContext& ctx, const ReasoningStep& step,
                           const WalkEdge& edge, bool is_init) {
  const std::string focus = ctx.view.label_of(step.focus_node);
  const std::string introduced = ctx.view.label_of(step.introduced_node);
  if (is_init) {
    switch (edge.kind) {
      case WalkEdgeKind::Relation:
        return step.focus_is_subject
                   ? capitalize("the " + focus + " is " + edge.predicate + " the " +
                                introduced + ".")
                   : capitalize("the one " + edge.predicate + " the " + focus + " is the " +
                                introduced + ".");
      case WalkEdgeKind::Attribute:
        return step.focus_is_subject
                   ? "The attribute asked is the " + focus + "'s " + edge.attr_kind +
                         ", which is " + edge.attr_value + "."
                   : "The object whose " + edge.attr_kind + " is " + edge.attr_value +
                         " is the " + introduced + ".";
      case WalkEdgeKind::Motion:
        if (edge.b_is_pseudo) {
          return step.focus_is_subject
                     ? "The " + focus + " is " + edge.predicate + "."
                     : "The object that is " + edge.predicate + " is the " + introduced +
                           ".";
        }
        return step.focus_is_subject
                   ? "The " + focus + " is " + edge.predicate + " the " + introduced + "."
                   : "The one " + edge.predicate + " the " + focus + " is the " +
                         introduced + ".";
      case WalkEdgeKind::Reference:
        return "The " + focus + " is the same object as the " + introduced +
               " seen in another clip.";
    }
  } else {
    switch (edge.kind) {
      case WalkEdgeKind::Relation:
        return step.focus_is_subject
                   ? "The one " + edge.predicate + " the " + introduced + " is the " +
                         focus + "."
                   : "The one that the " + introduced + " is " + edge.predicate +
                         " is the " + focus + ".";
      case WalkEdgeKind::Attribute:
        return "The object whose " + edge.attr_kind + " is " + edge.attr_value +
               " is the " + focus + ".";
      case WalkEdgeKind::Motion:
        if (edge.b_is_pseudo) {
          return "The one that is " + edge.predicate + " is the " + focus + ".";
        }
        return step.focus_is_subject
                   ? "The one " + edge.predicate + " the " + introduced + " is the " +
                         focus + "."
                   : "The one that the " + introduced + " is " + edge.predicate +
                         " is the " + focus + ".";
      case WalkEdgeKind::Reference:
        return "The object that is the same as the " + introduced +
               " in another clip is the " + focus + ".";
    }
  }
  return "";
}

}  // namespace

QRASample render_qra(const ReasoningPath& path, const SpatioTemporalSceneGraph& stsg,
                     const QuestionRegistry& registry, std::uint64_t seed) {
  if (path.steps.empty()) {
    throw InputError("empty-path", "cannot render a path with no steps");
  }
  NeighborView view(stsg);
  RenderContext ctx{view, path, {}, {}};
  for (const auto& clip : stsg.clips) {
    for (const auto& node : clip.nodes) ctx.label_counts[node.label]++;
  }
  for (std::size_t i = 1; i < path.steps.size(); ++i) {
    ctx.expanded_at[path.steps[i].focus_node] = i;
  }

  const ReasoningStep& init = path.steps.front();
  const WalkEdge* init_edge = ctx.edge_of(init);
  if (init_edge == nullptr) {
    throw InputError("stale-path", "path references an edge absent from the graph: " +
                                       init.edge_id);
  }

  Rng rng(seed);
  TemplateKind kind = template_kind_for(*init_edge);
  AnswerSlot slot = init.focus_is_subject ? AnswerSlot::EndpointB : AnswerSlot::EndpointA;
  const auto& forms = registry.forms(kind, slot);
  const std::string& form = forms[rng.next_below(forms.size())];

  std::map<std::string, std::string> bindings;
  bindings["predicate"] = init_edge->predicate;
  bindings["kind"] = init_edge->attr_kind;
  bindings["value"] = init_edge->attr_value;
  bindings["subject"] = ctx.mention(init.focus_node);
  bindings["object"] = ctx.mention(init.focus_node);
  bindings["other"] = ctx.mention(init.focus_node);
  bindings["description"] = "";
  bindings["t1"] = format_seconds(init_edge->t1);
  bindings["t2"] = format_seconds(init_edge->t2);

  std::string question = render_surface(form, bindings);
  if (path.temporal_context) {
    question = "Between " + format_seconds(path.temporal_context->t_start) + "s and " +
               format_seconds(path.temporal_context->t_end) + "s, " +
               std::string(1, static_cast<char>(std::tolower(
                                  static_cast<unsigned char>(question.front())))) +
               question.substr(1);
  }

  // Resolution order: deepest reference first, the initial edge last.
  QRASample sample;
  sample.video_id = path.video_id;
  sample.question = question;
  int line_no = 1;
  for (std::size_t i = path.steps.size(); i-- > 1;) {
    const ReasoningStep& step = path.steps[i];
    const WalkEdge* edge = ctx.edge_of(step);
    if (edge == nullptr) {
      throw InputError("stale-path", "path references an edge absent from the graph");
    }
    sample.rationale.push_back("Step " + std::to_string(line_no++) + ": " +
                               rationale_line(ctx, step, *edge, false));
  }
  sample.rationale.push_back("Step " + std::to_string(line_no) + ": " +
                             rationale_line(ctx, init, *init_edge, true));

  sample.answer = init.sub_answer;
  sample.num_steps = path.achieved_n;
  sample.temporal_context = path.temporal_context;
  sample.path_provenance = serialize_path(path);
  return sample;
}

QRASample refine_qra(QRASample sample, GatewayClient& client,
                     std::vector<std::string>* warnings) {
  std::string joined;
  for (std::size_t i = 0; i < sample.rationale.size(); ++i) {
    if (i > 0) joined += " ";
    joined += sample.rationale[i];
  }

  std::string reply;
  try {
    reply = client
                .complete(client.make_request(
                    "qra_refine",
                    {{"q", sample.question}, {"r", joined}, {"a", sample.answer}}))
                .text;
  } catch (const Error& e) {
    if (warnings) warnings->push_back("refinement call failed: " + e.code());
    return sample;
  }

  RefinedQraPayload refined;
  try {
    refined = parse_model_output(PayloadKind::RefinedQRA, reply).refined_qra();
  } catch (const ParseError&) {
    if (warnings) warnings->push_back("refinement reply was malformed; keeping original");
    return sample;
  }

  OriginalQra original{sample.question, sample.rationale, sample.answer};

  // Re-split the rationale on "Step i:" markers when present.
  std::vector<std::string> steps;
  static const std::regex marker(R"(Step\s+\d+\s*:)");
  auto begin = std::sregex_iterator(refined.rationale.begin(), refined.rationale.end(),
                                    marker);
  std::vector<std::size_t> positions;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    positions.push_back(static_cast<std::size_t>(it->position()));
  }
  if (!positions.empty()) {
    for (std::size_t i = 0; i < positions.size(); ++i) {
      std::size_t from = positions[i];
      std::size_t to = (i + 1 < positions.size()) ? positions[i + 1]
                                                  : refined.rationale.size();
      std::string piece = trim(refined.rationale.substr(from, to - from));
      if (!piece.empty()) steps.push_back(piece);
    }
  } else {
    std::string whole = trim(refined.rationale);
    if (!whole.empty()) steps.push_back(whole);
  }
  if (steps.empty()) {
    if (warnings) warnings->push_back("refined rationale was empty; keeping original");
    return sample;
  }

  sample.original = std::move(original);
  sample.question = refined.question;
  sample.rationale = std::move(steps);
  sample.answer = refined.answer;
  sample.refined = true;
  if (token_overlap(sample.original->answer, sample.answer) < 0.5) {
    sample.answer_drift = true;
  }
  return sample;
}

}  // namespace stsg
