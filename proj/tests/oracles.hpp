#pragma once

// Reference computations for the tests. Nothing here calls into the
// library's own numerics; values are rebuilt from closed forms, brute force
// or a third-party decomposition.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ifs/ifs.hpp"

namespace oracle {

using ifs::AffineMap;
using ifs::Mat2;
using ifs::Vec2;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
inline const double kLipEndingF1 = std::sqrt(3.0 * std::sqrt(17.0) + 13.0) / 4.0;
inline const double kCriticalP1 = (4.0 - 2.0 * std::sqrt(2.0)) / (std::sqrt(3.0 * std::sqrt(17.0) + 13.0) - 2.0 * std::sqrt(2.0));

// The triangle system, typed in directly.
inline AffineMap triangle_f1() { return {{1.0, 0.5, 0.0, 0.5}, {0.0, 0.0}}; }
inline AffineMap triangle_f2() { return {{0.0, 0.5, -1.0, -0.5}, {0.0, 1.0}}; }
inline ifs::IfsSystem triangle_system(double p1 = 0.5) {
  return ifs::IfsSystem({triangle_f1(), triangle_f2()}, std::vector<double>{p1, 1.0 - p1});
}
inline ifs::ConvexPolygon triangle() { return ifs::ConvexPolygon({{0, 0}, {1, 0}, {0, 1}}); }

// (x, y) -> (x/2 + 1/2, y) and (x, y) -> (x, y/2).
inline ifs::IfsSystem shear_system() {
  return ifs::IfsSystem({AffineMap{{0.5, 0.0, 0.0, 1.0}, {0.5, 0.0}}, AffineMap{{1.0, 0.0, 0.0, 0.5}, {0.0, 0.0}}},
                        std::vector<double>{0.5, 0.5});
}

inline Mat2 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

inline AffineMap random_map(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {random_matrix(rng, scale), {u(rng), u(rng)}};
}

/// |A u(theta)| for the unit vector at angle theta.
inline double stretch(const Mat2& a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return std::hypot(a.a11 * c + a.a12 * s, a.a21 * c + a.a22 * s);
}

/// sup |A u| over random unit vectors, then golden-section refinement around
/// the best sample (|A u(theta)|^2 has exactly one maximum per half turn).
inline double sampled_norm(const Mat2& a, int samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, M_PI);
  double best_theta = 0.0, best = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double t = angle(rng);
    const double v = stretch(a, t);
    if (v > best) best = v, best_theta = t;
  }
  double lo = best_theta - M_PI / samples * 4, hi = best_theta + M_PI / samples * 4;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (stretch(a, m1) < stretch(a, m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, stretch(a, 0.5 * (lo + hi)));
}

/// sqrt of the top eigenvalue of A^T A by power iteration.
inline double power_iteration_norm(const Mat2& a, int iterations = 2000) {
  const double g11 = a.a11 * a.a11 + a.a21 * a.a21;
  const double g12 = a.a11 * a.a12 + a.a21 * a.a22;
  const double g22 = a.a12 * a.a12 + a.a22 * a.a22;
  double x = 1.0, y = 0.618;  // generic start
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const double nx = g11 * x + g12 * y, ny = g12 * x + g22 * y;
    const double n = std::hypot(nx, ny);
    if (n == 0.0) return 0.0;
    x = nx / n, y = ny / n;
    lambda = x * (g11 * x + g12 * y) + y * (g12 * x + g22 * y);
  }
  return std::sqrt(lambda);
}

inline double eigen_norm(const Mat2& a) {
  Eigen::Matrix2d m;
  m << a.a11, a.a12, a.a21, a.a22;
  return Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues()(0);
}

inline double brute_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// How far p is outside the triangle (0,0), (1,0), (0,1), measured on the
/// barycentric coordinates x, y, 1 - x - y.
inline double barycentric_violation(Vec2 p) {
  return std::max({0.0, -p.x, -p.y, p.x + p.y - 1.0});
}

/// Lattice points of step h inside the triangle.
inline std::vector<Vec2> triangle_raster(double h = 0.01) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  std::vector<Vec2> out;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) out.push_back({i * h, j * h});
  return out;
}

/// Area of the rectangle [x0,x1]x[y0,y1] intersected with a convex polygon
/// (counter-clockwise), by clipping the polygon against the four sides.
inline double clipped_area(std::vector<Vec2> poly, double x0, double x1, double y0, double y1) {
  auto clip = [](const std::vector<Vec2>& in, auto inside, auto cut) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2 a = in[i], b = in[(i + 1) % in.size()];
      const bool ia = inside(a), ib = inside(b);
      if (ia) out.push_back(a);
      if (ia != ib) out.push_back(cut(a, b));
    }
    return out;
  };
  auto at_x = [](double x) {
    return [x](Vec2 a, Vec2 b) { return Vec2{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto at_y = [](double y) {
    return [y](Vec2 a, Vec2 b) { return Vec2{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  poly = clip(poly, [&](Vec2 p) { return p.x >= x0; }, at_x(x0));
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.x <= x1; }, at_x(x1));
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.y >= y0; }, at_y(y0));
  if (poly.empty()) return 0.0;
  poly = clip(poly, [&](Vec2 p) { return p.y <= y1; }, at_y(y1));
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return std::abs(0.5 * s);
}

/// Normalised Lebesgue measure on a convex polygon, cell masses exact.
inline ifs::GridMeasure exact_uniform(const std::vector<Vec2>& poly, ifs::Box box, std::size_t m) {
  ifs::GridMeasure g(box, m);
  const double w = box.width() / double(m), h = box.height() / double(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      const double a = clipped_area(poly, box.xmin + i * w, box.xmin + (i + 1) * w, box.ymin + j * h, box.ymin + (j + 1) * h);
      g.mass()[j * m + i] = a;
      total += a;
    }
  for (auto& v : g.mass()) v /= total;
  return g;
}

}  // namespace oracle
