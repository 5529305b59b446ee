#pragma once

#include <limits>
#include <vector>

namespace arcjet {

using PointSet = std::vector<std::vector<double>>;

struct LofConfig {
  int k = 20;              // clamped to n-1 at use
  double threshold = 1.5;  // frames scoring above this are rejected

  void validate() const;
  bool operator==(const LofConfig&) const = default;
};

/// Local Outlier Factor with Euclidean distance and exactly k neighbours per
/// point (equal distances ordered by index).
///
///   k-dist(b)    distance from b to its k-th neighbour
///   reach(a, b)  max(k-dist(b), d(a, b))
///   lrd(a)       1 / mean_{b in N(a)} reach(a, b)   (+inf when that mean is 0)
///   LOF(a)       mean_{b in N(a)} lrd(b) / lrd(a)   (inf/inf counts as 1)
///
/// Throws Error{DegenerateInput} for n < 2 or ragged rows, Error{NonFinite}
/// for NaN/inf coordinates.
std::vector<double> lof_scores(const PointSet& points, int k);

struct FrameFilterResult {
  std::vector<bool> keep;
  std::vector<double> scores;  // 1.0 for pass-through batches
};

/// Standardises each feature dimension (constant dimensions dropped), scores
/// with LOF and keeps score <= threshold. Batches of fewer than two frames, or
/// with no varying dimension, are kept whole.
FrameFilterResult filter_frames(const PointSet& features, const LofConfig& cfg);

}  // namespace arcjet
