#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"

namespace ifs {

inline constexpr double kConvexityTolerance = 1e-12;

/// Convex polygon with counter-clockwise vertices. Degenerate (zero-area)
/// polygons are allowed: deep fibre images collapse onto segments.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  /// Accepts either orientation; clockwise input is reversed. Throws
  /// DegeneratePolygon for fewer than three vertices or a non-convex ring.
  explicit ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3)
      throw Error(Errc::DegeneratePolygon, "polygon needs at least 3 vertices");
    for (const auto& v : vertices_)
      if (!is_finite(v)) throw Error(Errc::DegeneratePolygon, "non-finite vertex");
    if (signed_area() < 0.0) std::reverse(vertices_.begin(), vertices_.end());
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n], c = vertices_[(i + 2) % n];
      if (cross(b - a, c - b) < -kConvexityTolerance)
        throw Error(Errc::DegeneratePolygon, "vertex ring is not convex at vertex " + std::to_string(i + 2));
    }
  }

  /// Axis-aligned rectangle.
  static ConvexPolygon box(double xmin, double xmax, double ymin, double ymax) {
    return ConvexPolygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
  }

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  /// Shoelace formula, taken relative to the first vertex.
  double signed_area() const noexcept {
    double twice = 0.0;
    const Vec2 o = vertices_.front();
    for (std::size_t i = 1; i + 1 < vertices_.size(); ++i)
      twice += cross(vertices_[i] - o, vertices_[i + 1] - o);
    return 0.5 * twice;
  }

  double area() const noexcept { return std::abs(signed_area()); }

  /// Largest pairwise vertex distance.
  double diameter() const noexcept { return farthest_pair().second; }

  /// Vertex pair realising the diameter, with the distance.
  std::pair<std::pair<Vec2, Vec2>, double> farthest_pair() const noexcept {
    std::pair<Vec2, Vec2> best{vertices_.front(), vertices_.front()};
    double d = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
        const double dij = distance(vertices_[i], vertices_[j]);
        if (dij > d) {
          d = dij;
          best = {vertices_[i], vertices_[j]};
        }
      }
    return {best, d};
  }

  Vec2 vertex_mean() const noexcept {
    Vec2 s{};
    for (const auto& v : vertices_) s = s + v;
    return (1.0 / double(vertices_.size())) * s;
  }

  /// True when p lies inside or within `tol` (Euclidean) of every edge line.
  bool contains(Vec2 p, double tol = 0.0) const noexcept {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = vertices_[i];
      const Vec2 e = vertices_[(i + 1) % n] - a;
      const double len = norm(e);
      if (len == 0.0) continue;
      if (cross(e, p - a) < -tol * len) return false;
    }
    return true;
  }

  /// Every vertex of `other` inside this polygon within `tol`.
  bool contains(const ConvexPolygon& other, double tol = 0.0) const noexcept {
    for (const auto& v : other.vertices())
      if (!contains(v, tol)) return false;
    return true;
  }

  double xmin() const noexcept { return extent([](Vec2 v) { return v.x; }, false); }
  double xmax() const noexcept { return extent([](Vec2 v) { return v.x; }, true); }
  double ymin() const noexcept { return extent([](Vec2 v) { return v.y; }, false); }
  double ymax() const noexcept { return extent([](Vec2 v) { return v.y; }, true); }

  /// Image under an affine map. Vertex order is reversed for orientation-
  /// reversing maps so the result stays counter-clockwise. No convexity
  /// re-check: affine images of convex polygons are convex.
  ConvexPolygon image(const AffineMap& f) const {
    ConvexPolygon out;
    out.vertices_.reserve(vertices_.size());
    for (const auto& v : vertices_) out.vertices_.push_back(f(v));
    if (determinant(f.linear) < 0.0) std::reverse(out.vertices_.begin(), out.vertices_.end());
    return out;
  }

 private:
  template <class Proj>
  double extent(Proj proj, bool max) const noexcept {
    double r = proj(vertices_.front());
    for (const auto& v : vertices_) r = max ? std::max(r, proj(v)) : std::min(r, proj(v));
    return r;
  }

  std::vector<Vec2> vertices_;
};

/// Lattice points (i*step, j*step) lying in the polygon (within 1e-12).
inline std::vector<Vec2> rasterize(const ConvexPolygon& poly, double step) {
  if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "raster step must be positive");
  std::vector<Vec2> out;
  const long i0 = static_cast<long>(std::floor(poly.xmin() / step));
  const long i1 = static_cast<long>(std::ceil(poly.xmax() / step));
  const long j0 = static_cast<long>(std::floor(poly.ymin() / step));
  const long j1 = static_cast<long>(std::ceil(poly.ymax() / step));
  for (long j = j0; j <= j1; ++j)
    for (long i = i0; i <= i1; ++i) {
      const Vec2 p{double(i) * step, double(j) * step};
      if (poly.contains(p, 1e-12)) out.push_back(p);
    }
  return out;
}

}  // namespace ifs
