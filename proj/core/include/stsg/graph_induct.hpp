#pragma once

#include <string>
#include <vector>

#include "stsg/gateway.hpp"
#include "stsg/graph.hpp"
#include "stsg/semantics_parse.hpp"

namespace stsg {

enum class VerdictSource { Model, LabelHeuristic };

// One same-object decision, kept for the audit trail. Source is Model when
// the gateway answered, LabelHeuristic when the engine fell back to labels
// (prompt failure counts as not-same).
struct IdentityVerdict {
  std::string a;  // "scope/node" of the first element
  std::string b;
  bool same = false;
  VerdictSource source = VerdictSource::Model;
};

struct InductOptions {
  double label_overlap_threshold = 0.5;  // candidate prefilter
  bool bridge_all_pairs = false;         // default: adjacent clips only
  int parse_retries = 1;
};

struct InductLog {
  std::vector<std::string> warnings;
  std::vector<IdentityVerdict> verdicts;
};

struct ClipMeta {
  std::string video_id;
  std::string clip_id;
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  double t_start = 0.0;
  double t_end = 0.0;
};

// Media identifiers handed to the gateway: "{video_id}/{clip_id}".
std::string clip_media_ref(const std::string& video_id, const std::string& clip_id);

// Merges one clip's FSG sequence: label-matched candidate pairs across
// consecutive frames are model-confirmed; confirmed chains collapse into one
// node (attribute union, anchors from every source frame, edges re-targeted).
// Dynamic chains additionally gain a MotionEdge from the action-extraction
// prompt chain over (first frame ts, last frame ts).
ClipGraph merge_clip(const ClipMeta& meta, const std::vector<FrameSceneGraph>& frames,
                     GatewayClient& client, const InductOptions& options = {},
                     InductLog* log = nullptr);

// Connects adjacent clips: node pairs passing the label-similarity prefilter
// are model-confirmed and confirmed pairs gain a ReferenceEdge.
SpatioTemporalSceneGraph bridge_clips(const std::string& video_id,
                                      std::vector<ClipGraph> clips, GatewayClient& client,
                                      const InductOptions& options = {},
                                      InductLog* log = nullptr);

// One sentence-level event description per clip, interval = clip time bounds.
// Empty clips and prompt failures leave the clip eventless.
ClipGraph attach_event(ClipGraph clip, const std::string& video_id, GatewayClient& client,
                       InductLog* log = nullptr);

}  // namespace stsg
