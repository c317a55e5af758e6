#include "stsg/visual_split.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "stsg/error.hpp"
#include "stsg/rng.hpp"
#include "stsg/text.hpp"

namespace stsg {

namespace {

void check_stream(const FrameFeatureStream& stream) {
  if (stream.features.empty()) {
    throw InputError("empty-stream", "feature stream has no frames");
  }
  if (stream.fps <= 0.0) {
    throw InputError("bad-fps", "fps must be positive");
  }
  std::size_t dim = stream.features.front().size();
  if (dim == 0) {
    throw InputError("bad-dim", "feature vectors must have width >= 1");
  }
  for (const auto& f : stream.features) {
    if (f.size() != dim) {
      throw InputError("ragged-features", "all feature vectors must share one width");
    }
  }
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

double normalized_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

CutList detect_cuts(const FrameFeatureStream& stream, double threshold, int min_scene_len) {
  check_stream(stream);
  if (min_scene_len < 1) {
    throw InputError("bad-min-scene-len", "min_scene_len must be >= 1");
  }
  CutList out;
  int prev_cut = 0;  // stream start counts as the previous boundary
  const int n = static_cast<int>(stream.frame_count());
  for (int i = 1; i < n; ++i) {
    double d = normalized_l1(stream.features[i - 1], stream.features[i]);
    if (d > threshold && i - prev_cut >= min_scene_len) {
      out.cut_indices.push_back(i);
      prev_cut = i;
    }
  }
  int start = 0;
  for (int cut : out.cut_indices) {
    out.clip_ranges.push_back({start, cut});
    start = cut;
  }
  out.clip_ranges.push_back({start, n});
  return out;
}

std::vector<int> select_keyframes(const FrameFeatureStream& stream, const ClipRange& clip,
                                  int k, std::uint64_t seed, int max_iters) {
  check_stream(stream);
  if (k < 1) throw InputError("bad-k", "k must be >= 1");
  const int len = clip.end_frame - clip.start_frame;
  if (len <= 0 || clip.start_frame < 0 ||
      clip.end_frame > static_cast<int>(stream.frame_count())) {
    throw InputError("bad-clip-range", "clip range is empty or out of bounds");
  }

  std::vector<int> all_indices(len);
  for (int i = 0; i < len; ++i) all_indices[i] = clip.start_frame + i;
  if (k >= len) return all_indices;

  auto frame = [&](int local) -> const std::vector<double>& {
    return stream.features[clip.start_frame + local];
  };

  // Initial centroids: k distinct frames drawn without replacement.
  Rng rng(seed);
  std::vector<int> pool(all_indices.size());
  for (int i = 0; i < len; ++i) pool[i] = i;
  rng.shuffle(pool);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  for (int c = 0; c < k; ++c) centroids.push_back(frame(pool[c]));

  std::vector<int> assignment(len, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < len; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = sq_dist(frame(i), centroids[c]);
        if (d < best_d) {  // ties keep the lowest cluster index
          best_d = d;
          best = c;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(stream.dim(), 0.0);
      int count = 0;
      for (int i = 0; i < len; ++i) {
        if (assignment[i] != c) continue;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += frame(i)[d];
        ++count;
      }
      if (count > 0) {
        for (double& v : mean) v /= count;
        centroids[c] = std::move(mean);
      }
      // Empty clusters keep their previous centroid; the completion pass
      // below restores the output cardinality.
    }
  }

  std::vector<int> selected;
  for (int c = 0; c < k; ++c) {
    int best_local = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < len; ++i) {
      if (assignment[i] != c) continue;
      double d = sq_dist(frame(i), centroids[c]);
      if (d < best_d || (d == best_d && (best_local == -1 || i < best_local))) {
        best_d = d;
        best_local = i;
      }
    }
    if (best_local >= 0) selected.push_back(best_local);
  }

  // Farthest-point completion when clusters emptied out: add the frame with
  // the largest distance to its nearest selected frame (ties -> smallest index).
  while (static_cast<int>(selected.size()) < k) {
    int best_local = -1;
    double best_d = -1.0;
    for (int i = 0; i < len; ++i) {
      if (std::find(selected.begin(), selected.end(), i) != selected.end()) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (int s : selected) nearest = std::min(nearest, sq_dist(frame(i), frame(s)));
      if (nearest > best_d) {
        best_d = nearest;
        best_local = i;
      }
    }
    if (best_local < 0) break;
    selected.push_back(best_local);
  }

  std::vector<int> result;
  result.reserve(selected.size());
  for (int local : selected) result.push_back(clip.start_frame + local);
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

FrameFeatureStream read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("io:open", "cannot open feature file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw InputError("empty-stream", "feature file has no header: " + path.string());
  }
  auto fields = split(trim(header), ',');
  if (fields.size() != 4) {
    throw InputError("bad-header", "feature header must be video_id,fps,dim,count");
  }
  FrameFeatureStream stream;
  stream.video_id = fields[0];
  std::size_t dim = 0;
  std::size_t count = 0;
  try {
    stream.fps = std::stod(fields[1]);
    dim = static_cast<std::size_t>(std::stoul(fields[2]));
    count = static_cast<std::size_t>(std::stoul(fields[3]));
  } catch (const std::exception&) {
    throw InputError("bad-header", "feature header fields fps/dim/count must be numeric");
  }
  stream.features.reserve(count);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != dim) {
      throw InputError("ragged-features",
                       "feature row width " + std::to_string(cells.size()) +
                           " does not match declared dim " + std::to_string(dim));
    }
    std::vector<double> row;
    row.reserve(dim);
    for (const auto& cell : cells) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("bad-feature-value", "non-numeric feature value: " + cell);
      }
    }
    stream.features.push_back(std::move(row));
  }
  if (stream.features.size() != count) {
    throw InputError("bad-count", "feature file declares " + std::to_string(count) +
                                      " rows but has " +
                                      std::to_string(stream.features.size()));
  }
  check_stream(stream);
  return stream;
}

void write_feature_file(const std::filesystem::path& path, const FrameFeatureStream& stream) {
  check_stream(stream);
  std::ofstream out(path);
  if (!out) throw IoError("io:open", "cannot write feature file: " + path.string());
  out << stream.video_id << ',' << format_seconds(stream.fps) << ',' << stream.dim() << ','
      << stream.frame_count() << '\n';
  char buf[64];
  for (const auto& row : stream.features) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.6f", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace stsg
