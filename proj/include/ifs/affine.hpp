#pragma once

// Planar affine maps x -> A x + b and the handful of closed-form 2x2
// linear-algebra routines the rest of the library is built on.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>

namespace ifs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator*(double s, Vec2 v) noexcept { return {s * v.x, s * v.y}; }

inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }

/// a*d - b*c with one rounding error (Kahan's fma trick). Shoelace areas of
/// deep fibre polygons cancel almost completely and need this.
inline double diff_of_products(double a, double d, double b, double c) noexcept {
  const double bc = b * c;
  const double err = std::fma(-b, c, bc);
  const double dop = std::fma(a, d, -bc);
  return dop + err;
}

inline double cross(Vec2 a, Vec2 b) noexcept { return diff_of_products(a.x, b.y, a.y, b.x); }

/// Row-major 2x2 matrix [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;

  static constexpr Mat2 identity() noexcept { return {}; }

  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Mat2 operator*(const Mat2& m, const Mat2& n) noexcept {
  return {m.a11 * n.a11 + m.a12 * n.a21, m.a11 * n.a12 + m.a12 * n.a22,
          m.a21 * n.a11 + m.a22 * n.a21, m.a21 * n.a12 + m.a22 * n.a22};
}

constexpr Vec2 operator*(const Mat2& m, Vec2 v) noexcept {
  return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

constexpr Mat2 transpose(const Mat2& m) noexcept { return {m.a11, m.a21, m.a12, m.a22}; }

inline double determinant(const Mat2& m) noexcept {
  return diff_of_products(m.a11, m.a22, m.a12, m.a21);
}

/// Largest singular value (operator 2-norm), from the closed form
/// s^2 = (T + sqrt(T^2 - 4 D^2)) / 2 with T the squared Frobenius norm.
inline double spectral_norm(const Mat2& m) noexcept {
  const double t = m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22;
  const double d = determinant(m);
  // T^2 - 4D^2 = (T - 2|D|)(T + 2|D|); factored to limit cancellation.
  const double disc = std::max(0.0, (t - 2.0 * std::abs(d)) * (t + 2.0 * std::abs(d)));
  return std::sqrt(std::max(0.0, 0.5 * (t + std::sqrt(disc))));
}

/// m^n by repeated multiplication, n >= 1.
inline Mat2 matrix_power(const Mat2& m, unsigned n) {
  assert(n >= 1);
  Mat2 result = m;
  for (unsigned i = 1; i < n; ++i) result = result * m;
  return result;
}

inline bool is_finite(const Mat2& m) noexcept {
  return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a21) &&
         std::isfinite(m.a22);
}

inline bool is_finite(Vec2 v) noexcept { return std::isfinite(v.x) && std::isfinite(v.y); }

struct AffineMap {
  Mat2 linear;
  Vec2 offset;

  static constexpr AffineMap identity() noexcept { return {}; }

  constexpr Vec2 operator()(Vec2 v) const noexcept { return linear * v + offset; }

  friend constexpr bool operator==(const AffineMap&, const AffineMap&) = default;
};

constexpr Vec2 apply(const AffineMap& m, Vec2 v) noexcept { return m(v); }

/// f o g, i.e. x -> f(g(x)).
constexpr AffineMap compose(const AffineMap& f, const AffineMap& g) noexcept {
  return {f.linear * g.linear, f.linear * g.offset + f.offset};
}

inline double lipschitz(const AffineMap& m) noexcept { return spectral_norm(m.linear); }

inline constexpr double kFixedPointSingularity = 1e-12;

/// Unique solution of (I - A) p = b; empty when 1 is (numerically) an
/// eigenvalue of A, in which case the fixed set is empty or a line.
inline std::optional<Vec2> fixed_point(const AffineMap& m) noexcept {
  const Mat2 k{1.0 - m.linear.a11, -m.linear.a12, -m.linear.a21, 1.0 - m.linear.a22};
  const double det = determinant(k);
  if (!(std::abs(det) >= kFixedPointSingularity)) return std::nullopt;
  const Vec2 b = m.offset;
  return Vec2{diff_of_products(b.x, k.a22, k.a12, b.y) / det,
              diff_of_products(k.a11, b.y, b.x, k.a21) / det};
}

}  // namespace ifs
