#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"

namespace ifs {

/// Finite planar point cloud, deduplicated on an origin-anchored lattice of
/// spacing `resolution` (first point seen per cell wins). Resolution 0 keeps
/// every distinct coordinate pair.
class PointSet {
 public:
  PointSet() = default;

  explicit PointSet(double resolution) : resolution_(resolution) {
    if (!(resolution >= 0.0) || !std::isfinite(resolution))
      throw Error(Errc::InvalidArgument, "dedup resolution must be finite and >= 0");
  }

  PointSet(const std::vector<Vec2>& points, double resolution) : PointSet(resolution) {
    points_.reserve(points.size());
    for (const auto& p : points) insert(p);
  }

  /// Returns false when the point's cell is already occupied.
  bool insert(Vec2 p) {
    if (!seen_.insert(key(p)).second) return false;
    points_.push_back(p);
    return true;
  }

  const std::vector<Vec2>& points() const noexcept { return points_; }
  double resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool contains_cell_of(Vec2 p) const { return seen_.count(key(p)) != 0; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

 private:
  struct Key {
    std::uint64_t x, y;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = k.x * 0x9E3779B97F4A7C15ull;
      h ^= (k.y + 0x7F4A7C159E3779B9ull) + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };

  static std::uint64_t bits(double v) noexcept {
    return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);  // -0 and +0 share a cell
  }

  Key key(Vec2 p) const noexcept {
    if (resolution_ == 0.0) return {bits(p.x), bits(p.y)};
    return {bits(std::floor(p.x / resolution_)), bits(std::floor(p.y / resolution_))};
  }

  std::vector<Vec2> points_;
  std::unordered_set<Key, KeyHash> seen_;
  double resolution_ = 0.0;
};

/// Bucket grid for exact nearest-neighbour distance queries.
class NearestIndex {
 public:
  explicit NearestIndex(const std::vector<Vec2>& points) : points_(points) {
    if (points_.empty()) throw Error(Errc::EmptyInput, "nearest-neighbour index over an empty set");
    xmin_ = xmax_ = points_.front().x;
    ymin_ = ymax_ = points_.front().y;
    for (const auto& p : points_) {
      xmin_ = std::min(xmin_, p.x);
      xmax_ = std::max(xmax_, p.x);
      ymin_ = std::min(ymin_, p.y);
      ymax_ = std::max(ymax_, p.y);
    }
    const double w = xmax_ - xmin_, h = ymax_ - ymin_;
    const double extent = std::max(w, h);
    const auto target = std::max<std::size_t>(1, points_.size());
    cell_ = extent > 0.0 ? std::max(extent / std::sqrt(double(target)), std::max(w, h) * 1e-9) : 1.0;
    nx_ = std::min<long>(static_cast<long>(w / cell_) + 1, 1 << 14);
    ny_ = std::min<long>(static_cast<long>(h / cell_) + 1, 1 << 14);
    start_.assign(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
    for (const auto& p : points_) ++start_[bucket(cx(p.x), cy(p.y)) + 1];
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    order_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i)
      order_[fill[bucket(cx(points_[i].x), cy(points_[i].y))]++] = i;
  }

  /// Euclidean distance from q to the closest indexed point.
  double distance_to(Vec2 q) const noexcept {
    const long qx = cx(q.x), qy = cy(q.y);
    double best = std::numeric_limits<double>::infinity();
    const long max_ring = std::max(nx_, ny_);
    for (long r = 0; r <= max_ring; ++r) {
      for (long j = qy - r; j <= qy + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        const bool edge_row = (j == qy - r || j == qy + r);
        for (long i = qx - r; i <= qx + r; i += (edge_row ? 1 : 2 * r)) {
          if (i >= 0 && i < nx_) scan(bucket(i, j), q, best);
          if (r == 0) break;
        }
      }
      // Any point in ring r+1 or beyond is at least r cells away.
      if (best <= double(r) * cell_) break;
    }
    return best;
  }

 private:
  long cx(double x) const noexcept { return std::clamp(static_cast<long>(std::floor((x - xmin_) / cell_)), 0L, nx_ - 1); }
  long cy(double y) const noexcept { return std::clamp(static_cast<long>(std::floor((y - ymin_) / cell_)), 0L, ny_ - 1); }
  std::size_t bucket(long i, long j) const noexcept { return static_cast<std::size_t>(j * nx_ + i); }

  void scan(std::size_t b, Vec2 q, double& best) const noexcept {
    for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) best = std::min(best, distance(q, points_[order_[k]]));
  }

  std::vector<Vec2> points_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
  double xmin_ = 0, xmax_ = 0, ymin_ = 0, ymax_ = 0, cell_ = 1;
  long nx_ = 1, ny_ = 1;
};

/// sup over a in A of dist(a, B).
inline double directed_hausdorff(const std::vector<Vec2>& a, const NearestIndex& b) {
  double d = 0.0;
  for (const auto& p : a) d = std::max(d, b.distance_to(p));
  return d;
}

inline double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptyInput, "Hausdorff distance of an empty set");
  return std::max(directed_hausdorff(a, NearestIndex(b)), directed_hausdorff(b, NearestIndex(a)));
}

inline double hausdorff_distance(const PointSet& a, const PointSet& b) {
  return hausdorff_distance(a.points(), b.points());
}

/// O(|A||B|) reference implementation.
inline double hausdorff_distance_brute(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptyInput, "Hausdorff distance of an empty set");
  auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double d = 0.0;
    for (const auto& p : from) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& q : to) m = std::min(m, distance(p, q));
      d = std::max(d, m);
    }
    return d;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// CSV with header `x,y`, 17 significant digits.
inline void write_csv(std::ostream& os, const PointSet& s) {
  const auto old = os.precision(17);
  os << "x,y\n";
  for (const auto& p : s) os << p.x << ',' << p.y << '\n';
  os.precision(old);
}

}  // namespace ifs
