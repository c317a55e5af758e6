#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stsg/gateway.hpp"
#include "stsg/reason_sample.hpp"

namespace stsg {

enum class TemplateKind { Relation, Attribute, Motion, MotionUnit, Reference, Event };
enum class AnswerSlot { EndpointA, EndpointB };  // which edge endpoint is the answer

std::string template_kind_name(TemplateKind kind);

// Surface forms for questions, keyed by edge kind and answer slot. The
// built-in registry ships at least three forms per key to pre-diversify
// phrasing; files can override it ("version 1" header, then
// kind|slot|form lines).
class QuestionRegistry {
 public:
  static QuestionRegistry builtin();
  static QuestionRegistry from_file(const std::filesystem::path& path);

  void add_form(TemplateKind kind, AnswerSlot slot, std::string form);
  const std::vector<std::string>& forms(TemplateKind kind, AnswerSlot slot) const;
  bool complete() const;  // every (kind, slot) key has at least one form

 private:
  std::map<std::pair<int, int>, std::vector<std::string>> forms_;
};

struct OriginalQra {
  std::string question;
  std::vector<std::string> rationale;
  std::string answer;

  bool operator==(const OriginalQra&) const = default;
};

struct QRASample {
  std::string video_id;
  std::string question;
  std::vector<std::string> rationale;  // "Step i: ..." lines, resolution order
  std::string answer;
  int num_steps = 0;  // reasoning depth of the backing path
  std::optional<TemporalContext> temporal_context;
  bool refined = false;
  bool answer_drift = false;            // refinement changed the answer materially
  std::optional<OriginalQra> original;  // pre-refinement copy
  std::string path_provenance;          // serialized backing path

  bool operator==(const QRASample&) const = default;
};

// Renders a reasoning path into a QRA sample. The question nests: each
// expansion replaces the expanded node's direct mention with its relational
// description. The rationale renders in resolution order (deepest reference
// first, initial edge last), numbered "Step i:". Temporal context prefixes
// the question with "Between {t1}s and {t2}s, ". Surface-form choice is
// seeded; rendering is deterministic per (path, registry, seed).
QRASample render_qra(const ReasoningPath& path, const SpatioTemporalSceneGraph& stsg,
                     const QuestionRegistry& registry, std::uint64_t seed);

// Sends the refinement prompt; a well-formed {"Q","R","A"} reply replaces the
// fields (original kept, rationale re-split on "Step i:" markers). Malformed
// replies leave the sample unchanged with refined = false. Never drops a
// sample. Answer rewrites with token overlap < 0.5 are flagged answer_drift.
QRASample refine_qra(QRASample sample, GatewayClient& client,
                     std::vector<std::string>* warnings = nullptr);

}  // namespace stsg
