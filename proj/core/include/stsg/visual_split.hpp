#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace stsg {

// One fixed-width feature vector per decoded frame, each component in [0, 1].
// Decoding itself is out-of-process; the engine only consumes these streams.
struct FrameFeatureStream {
  std::string video_id;
  double fps = 0.0;
  std::vector<std::vector<double>> features;

  std::size_t frame_count() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
};

struct ClipRange {
  int start_frame = 0;
  int end_frame = 0;  // exclusive
};

struct CutList {
  std::vector<int> cut_indices;  // strictly increasing
  std::vector<ClipRange> clip_ranges;
};

struct SplitParams {
  double threshold = 0.3;  // normalized L1 content difference
  int min_scene_len = 15;  // frames
  int keyframes_per_clip = 4;
  int kmeans_max_iters = 20;
  std::uint64_t seed = 0;
};

// Mean absolute component difference between two frames of equal width.
double normalized_l1(const std::vector<double>& a, const std::vector<double>& b);

// A cut lands at index i when normalized_l1(features[i-1], features[i]) exceeds
// the threshold and the previous cut (or stream start) is at least
// min_scene_len frames back.
CutList detect_cuts(const FrameFeatureStream& stream, double threshold, int min_scene_len);

// Seeded k-means over one clip's feature vectors; returns per-cluster the
// global index of the frame nearest its centroid (ties -> smallest index),
// sorted ascending. Output size is min(k, clip length).
std::vector<int> select_keyframes(const FrameFeatureStream& stream, const ClipRange& clip,
                                  int k, std::uint64_t seed, int max_iters = 20);

// Frame-feature file: header "video_id,fps,dim,count" then `count` lines of
// `dim` comma-separated decimals.
FrameFeatureStream read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const FrameFeatureStream& stream);

}  // namespace stsg
