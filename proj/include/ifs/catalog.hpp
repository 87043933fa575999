#pragma once

// Built-in systems: the two-map triangle system and a two-map shear
// example, with their known reference values.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"
#include "ifs/polygon.hpp"
#include "ifs/system.hpp"

namespace ifs {

/// Where a reference value comes from.
enum class Source {
  Published,   ///< stated in the literature for this system
  Derived,     ///< computed by hand or by an independent method from published values
  Definition,  ///< follows directly from a definition
};

constexpr std::string_view to_string(Source s) noexcept {
  switch (s) {
    case Source::Published: return "published";
    case Source::Derived: return "derived";
    case Source::Definition: return "definition";
  }
  return "unknown";
}

struct Reference {
  double value = 0.0;
  Source source = Source::Derived;
};

struct ReferencePoint {
  Vec2 value;
  Source source = Source::Derived;
};

/// Reference values for the triangle system, built from exact expressions.
struct TriangleFacts {
  Reference det_a1{0.5, Source::Published};
  Reference det_a2{0.5, Source::Published};
  /// ||A_i A_2||_2
  Reference lip_ending_f2{1.0 / std::sqrt(2.0), Source::Published};
  /// ||A_i A_1||_2
  Reference lip_ending_f1{std::sqrt(3.0 * std::sqrt(17.0) + 13.0) / 4.0, Source::Published};
  /// sum over i,j of p_i p_j Lip(f_i o f_j) at p = (1/2, 1/2)
  Reference average_k2{0.5 * (1.0 / std::sqrt(2.0) + std::sqrt(3.0 * std::sqrt(17.0) + 13.0) / 4.0),
                       Source::Derived};
  Reference critical_p1{(4.0 - 2.0 * std::sqrt(2.0)) / (std::sqrt(3.0 * std::sqrt(17.0) + 13.0) - 2.0 * std::sqrt(2.0)),
                        Source::Published};
  ReferencePoint point_fibre{{0.25, 0.5}, Source::Published};       ///< fibre at 2 2 2 ...
  ReferencePoint segment_from{{0.0, 0.0}, Source::Published};       ///< fibre at 1 1 1 ...
  ReferencePoint segment_to{{1.0, 0.0}, Source::Published};
};

struct ShearFacts {
  /// Lipschitz constants of the second iterate, words 11, 12, 21, 22.
  std::vector<Reference> lip_k2{{1.0, Source::Published}, {0.5, Source::Published},
                                {0.5, Source::Published}, {1.0, Source::Published}};
  Reference average_k2{0.75, Source::Derived};
  ReferencePoint semiattractor{{1.0, 0.0}, Source::Published};
};

struct ReferenceFacts {
  TriangleFacts triangle;
  ShearFacts shear;
};

struct NamedSystem {
  std::string name;
  IfsSystem system;
  std::optional<ConvexPolygon> invariant_hint;
};

inline ConvexPolygon unit_triangle() { return ConvexPolygon({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}); }

/// f_i(x, y) = A_i (x, y) + (0, i - 1) with A_1 = [[1, 1/2], [0, 1/2]],
/// A_2 = [[0, 1/2], [-1, -1/2]]; probabilities (p1, 1 - p1); invariant
/// polygon the triangle (0,0), (1,0), (0,1).
inline NamedSystem triangle_pair(double p1 = 0.5) {
  if (!(p1 > 0.0 && p1 < 1.0))
    throw Error(Errc::InvalidProbability, "p1 must lie strictly between 0 and 1, got " + std::to_string(p1));
  const AffineMap f1{{1.0, 0.5, 0.0, 0.5}, {0.0, 0.0}};
  const AffineMap f2{{0.0, 0.5, -1.0, -0.5}, {0.0, 1.0}};
  return {"triangle", IfsSystem({f1, f2}, std::vector<double>{p1, 1.0 - p1}), unit_triangle()};
}

/// f_1(x, y) = (x/2 + 1/2, y), f_2(x, y) = (x, y/2), equal probabilities.
/// Neither map contracts, yet every orbit collapses onto (1, 0).
inline NamedSystem shear_pair() {
  const AffineMap f1{{0.5, 0.0, 0.0, 1.0}, {0.5, 0.0}};
  const AffineMap f2{{1.0, 0.0, 0.0, 0.5}, {0.0, 0.0}};
  return {"shear-pair", IfsSystem({f1, f2}, std::vector<double>{0.5, 0.5}),
          ConvexPolygon::box(0.0, 1.0, 0.0, 1.0)};
}

}  // namespace ifs
