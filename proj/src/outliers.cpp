#include "arcjet/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arcjet/error.hpp"

namespace arcjet {

void LofConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "LOF k must be >= 1");
  if (!(threshold > 0)) throw Error(ErrorCode::ConfigInvalid, "LOF threshold must be > 0");
}

std::vector<double> lof_scores(const PointSet& points, int k_requested) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(ErrorCode::DegenerateInput, "LOF needs at least two points");
  if (k_requested < 1) throw Error(ErrorCode::ConfigInvalid, "LOF k must be >= 1");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::DegenerateInput, "points have different dimensions");
    for (double v : p) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite coordinate");
    }
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_requested), n - 1);

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = points[a][d] - points[b][d];
        s += diff * diff;
      }
      dist[a * n + b] = dist[b * n + a] = std::sqrt(s);
    }
  }

  std::vector<std::vector<std::size_t>> neighbours(n);
  std::vector<double> kdist(n);
  std::vector<std::size_t> cand;
  for (std::size_t a = 0; a < n; ++a) {
    cand.clear();
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) cand.push_back(b);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(),
                      [&](std::size_t x, std::size_t y) {
                        const double dx = dist[a * n + x], dy = dist[a * n + y];
                        return dx < dy || (dx == dy && x < y);
                      });
    neighbours[a].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
    kdist[a] = dist[a * n + neighbours[a].back()];
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> lrd(n);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b : neighbours[a]) sum += std::max(kdist[b], dist[a * n + b]);
    lrd[a] = sum > 0.0 ? static_cast<double>(k) / sum : inf;
  }

  std::vector<double> scores(n);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b : neighbours[a]) {
      if (std::isinf(lrd[a]) && std::isinf(lrd[b])) {
        sum += 1.0;
      } else {
        sum += lrd[b] / lrd[a];
      }
    }
    scores[a] = sum / static_cast<double>(k);
  }
  return scores;
}

FrameFilterResult filter_frames(const PointSet& features, const LofConfig& cfg) {
  cfg.validate();
  const std::size_t n = features.size();
  FrameFilterResult out{std::vector<bool>(n, true), std::vector<double>(n, 1.0)};
  if (n < 2) return out;

  const std::size_t dim = features.front().size();
  PointSet standardized(n);
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& f : features) mean += f.at(d);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& f : features) var += (f[d] - mean) * (f[d] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) continue;  // constant dimension
    for (std::size_t i = 0; i < n; ++i) standardized[i].push_back((features[i][d] - mean) / sd);
  }
  if (standardized.front().empty()) return out;

  out.scores = lof_scores(standardized, cfg.k);
  for (std::size_t i = 0; i < n; ++i) out.keep[i] = out.scores[i] <= cfg.threshold;
  return out;
}

}  // namespace arcjet
