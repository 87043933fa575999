#pragma once

// Self-check suite: reruns every quantitative claim about the built-in
// systems against the live implementation and reports expected next to
// measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/catalog.hpp"
#include "ifs/fibres.hpp"
#include "ifs/measure.hpp"
#include "ifs/point_set.hpp"
#include "ifs/polygon.hpp"
#include "ifs/set_dynamics.hpp"
#include "ifs/system.hpp"

namespace ifs {

enum class Scale { Quick, Full };

struct CheckResult {
  std::string id;
  std::string title;
  Source source = Source::Derived;
  std::string expected;
  std::string measured;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

struct VerifyReport {
  Scale scale = Scale::Quick;
  std::vector<CheckResult> checks;

  bool all_passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  std::size_t failures() const noexcept {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
  }
};

namespace detail {

inline std::string fmt(double v, int digits = 12) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

inline std::string fmt(Vec2 v, int digits = 10) { return "(" + fmt(v.x, digits) + ", " + fmt(v.y, digits) + ")"; }

/// Largest ||A u|| over `samples` random unit vectors, then refined by
/// golden-section search on the angle around the best sample.
inline double sampled_operator_norm(const Mat2& a, int samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  auto value = [&](double t) { return norm(a * Vec2{std::cos(t), std::sin(t)}); };
  double best = -1.0, best_t = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = angle(rng);
    if (const double v = value(t); v > best) {
      best = v;
      best_t = t;
    }
  }
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_t - 4.0 * M_PI / samples, hi = best_t + 4.0 * M_PI / samples;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (value(m1) < value(m2))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, value(0.5 * (lo + hi)));
}

/// sqrt of the dominant eigenvalue of A^T A by power iteration.
inline double power_iteration_norm(const Mat2& a, int iterations = 500) {
  const Mat2 g = transpose(a) * a;
  Vec2 v{1.0, 0.7548776662466927};
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Vec2 w = g * v;
    const double n = norm(w);
    if (n == 0.0) return 0.0;
    lambda = n / norm(v);
    v = (1.0 / n) * w;
  }
  return std::sqrt(lambda);
}

inline const std::vector<Vec2>& triangle_raster() {
  static const std::vector<Vec2> raster = rasterize(unit_triangle(), 0.01);
  return raster;
}

inline double barycentric_violation(Vec2 p) {
  // Unit triangle: barycentric coordinates (1 - x - y, x, y).
  return std::max({0.0, -(1.0 - p.x - p.y), -p.x, -p.y});
}

inline OrbitConfig standard_orbit() { return OrbitConfig{100, 100000, 0, 1}; }

inline const std::vector<Vec2>& triangle_starts() {
  static const std::vector<Vec2> starts{{0.3, 0.3}, {5.0, 5.0}, {-2.0, 1.0}};
  return starts;
}

}  // namespace detail

/// Runs every check. `facts` are the reference values compared against;
/// pass a modified copy to confirm a wrong constant is caught.
inline VerifyReport verify_all(Scale scale, const ReferenceFacts& facts = {}) {
  using detail::fmt;
  VerifyReport report{scale, {}};
  const auto& tf = facts.triangle;
  const NamedSystem tri_sys = triangle_pair(0.5);
  const IfsSystem& s = tri_sys.system;
  const ConvexPolygon tri = *tri_sys.invariant_hint;
  const Box bounds{};
  const int property_samples = scale == Scale::Full ? 1000 : 200;

  auto run = [&](std::string id, std::string title, Source source, auto&& body) {
    CheckResult c;
    c.id = std::move(id);
    c.title = std::move(title);
    c.source = source;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.measured = std::string("exception: ") + e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.checks.push_back(std::move(c));
  };

  run("C01", "Lipschitz constants of the second-iterate maps", tf.lip_ending_f1.source, [&](CheckResult& c) {
    double worst = 0.0;
    std::string measured;
    for (unsigned i = 1; i <= 2; ++i)
      for (unsigned j = 1; j <= 2; ++j) {
        const double lip = lipschitz(compose_word(s, Word{i, j}));
        const double want = j == 2 ? tf.lip_ending_f2.value : tf.lip_ending_f1.value;
        worst = std::max(worst, std::abs(lip - want));
        measured += (measured.empty() ? "" : ", ") + std::string("Lip(f") + std::to_string(i) + "f" +
                    std::to_string(j) + ")=" + fmt(lip, 16);
      }
    c.expected = "1/sqrt2=" + fmt(tf.lip_ending_f2.value, 16) + ", sqrt(3sqrt17+13)/4=" + fmt(tf.lip_ending_f1.value, 16);
    c.measured = measured + "; max error " + fmt(worst, 3);
    c.tolerance = 1e-12;
    c.passed = worst <= c.tolerance;
  });

  run("C02", "Second iterate is contractive on average", tf.average_k2.source, [&](CheckResult& c) {
    double sum = 0.0;
    for (unsigned i = 1; i <= 2; ++i)
      for (unsigned j = 1; j <= 2; ++j) sum += lipschitz(compose_word(s, Word{i, j}));
    const double avg = average_contractivity(s, 2);
    c.expected = fmt(tf.average_k2.value, 15) + " (sum of Lip < 4)";
    c.measured = fmt(avg, 15) + " (sum " + fmt(sum, 15) + ")";
    c.tolerance = 1e-9;
    c.passed = std::abs(avg - tf.average_k2.value) <= c.tolerance && sum < 4.0;
  });

  run("C03", "Critical probability for the second iterate", tf.critical_p1.source, [&](CheckResult& c) {
    const auto cp = critical_probability(s, 2);
    c.expected = fmt(tf.critical_p1.value, 15);
    c.measured = cp.has_threshold() ? fmt(cp.value, 15) : "no threshold";
    c.tolerance = 1e-8;
    c.passed = cp.has_threshold() && std::abs(cp.value - tf.critical_p1.value) <= c.tolerance &&
               std::abs(cp.value - 0.53) < 0.005;
  });

  run("C04", "Determinants and fibre area law up to depth 40", tf.det_a1.source, [&](CheckResult& c) {
    const double d1 = determinant(s.map(1).linear), d2 = determinant(s.map(2).linear);
    double worst = 0.0;
    std::size_t polygons = 0;
    auto check_address = [&](const Address& a, std::size_t depth) {
      const auto seq = fibre_sequence(s, tri, a, depth);
      for (const auto& st : seq.steps) {
        const double want = std::pow(tf.det_a1.value, double(st.depth)) * tri.area();
        worst = std::max(worst, std::abs(st.area - want) / want);
        ++polygons;
      }
    };
    // Every address up to depth 10 (as prefixes of depth-10 words), plus
    // random addresses and the constant ones to depth 40.
    for (std::size_t idx = 0; idx < (1u << 10); ++idx) check_address({detail::word_at(idx, 2, 10), {}}, 10);
    std::mt19937_64 rng(12345);
    const int randoms = scale == Scale::Full ? 400 : 50;
    for (int r = 0; r < randoms; ++r) {
      std::vector<unsigned> letters(40);
      for (auto& l : letters) l = 1 + static_cast<unsigned>(rng() & 1u);
      check_address({Word(letters), {}}, 40);
    }
    check_address(Address::constant(1), 40);
    check_address(Address::constant(2), 40);
    c.expected = "det A1 = det A2 = " + fmt(tf.det_a1.value) + "; area_k = det^k * 1/2";
    c.measured = "det A1 = " + fmt(d1, 17) + ", det A2 = " + fmt(d2, 17) + "; max rel area error " + fmt(worst, 3) +
                 " over " + std::to_string(polygons) + " polygons";
    c.tolerance = 1e-10;
    c.passed = d1 == tf.det_a1.value && d2 == tf.det_a2.value && worst <= c.tolerance;
  });

  run("C05", "Closed form of A1^n for n = 1..40", Source::Published, [&](CheckResult& c) {
    double worst = 0.0;
    for (unsigned n = 1; n <= 40; ++n) {
      const Mat2 p = matrix_power(s.map(1).linear, n);
      const double t = std::ldexp(1.0, -int(n));
      worst = std::max({worst, std::abs(p.a11 - 1.0), std::abs(p.a12 - (1.0 - t)), std::abs(p.a21),
                        std::abs(p.a22 - t)});
    }
    c.expected = "[[1, 1-2^-n], [0, 2^-n]]";
    c.measured = "max entry error " + fmt(worst, 3);
    c.tolerance = 1e-12;
    c.passed = worst <= c.tolerance;
  });

  run("C06", "Fibre witnesses at depth 40", tf.point_fibre.source, [&](CheckResult& c) {
    const DeepeningOptions fixed_depth{40, 40, 10, {}};
    const auto seg = classify_address(s, tri, Address::constant(1), fixed_depth);
    const auto pt = classify_address(s, tri, Address::constant(2), fixed_depth);
    c.tolerance = 1e-6;
    const bool seg_ok = seg.cls.kind == FibreClass::Kind::Segment &&
                        distance(seg.cls.from, tf.segment_from.value) <= c.tolerance &&
                        distance(seg.cls.to, tf.segment_to.value) <= c.tolerance;
    const bool pt_ok = pt.cls.kind == FibreClass::Kind::Point && distance(pt.cls.point, tf.point_fibre.value) <= c.tolerance;
    c.expected = "1 1 1 ...: segment " + fmt(tf.segment_from.value) + "-" + fmt(tf.segment_to.value) +
                 "; 2 2 2 ...: point " + fmt(tf.point_fibre.value);
    c.measured = "1 1 1 ...: " + std::string(FibreClass::name(seg.cls.kind)) + " " + fmt(seg.cls.from) + "-" +
                 fmt(seg.cls.to) + "; 2 2 2 ...: " + std::string(FibreClass::name(pt.cls.kind)) + " " + fmt(pt.cls.point);
    c.passed = seg_ok && pt_ok;
  });

  run("C07", "Contractive word and strong fibredness", Source::Published, [&](CheckResult& c) {
    const auto w = find_contractive_word(s, 2);
    const auto rep = strongly_fibred_report(s, tri, 2);
    c.expected = "word 22 with Lip " + fmt(tf.lip_ending_f2.value) + "; strongly fibred, not point fibred";
    c.measured = (w ? "word " + w->word.str() + " with Lip " + fmt(w->lipschitz) : std::string("no word")) + "; " +
                 (rep.verdict == StronglyFibredReport::Verdict::StronglyFibred ? "strongly fibred" : "inconclusive") +
                 (rep.point_fibred_falsified ? ", not point fibred" : ", point fibredness not falsified");
    c.tolerance = 1e-12;
    c.passed = w && w->word == Word{2, 2} && std::abs(w->lipschitz - tf.lip_ending_f2.value) <= c.tolerance &&
               rep.verdict == StronglyFibredReport::Verdict::StronglyFibred && rep.point_fibred_falsified &&
               rep.singleton && distance(*rep.singleton, tf.point_fibre.value) <= 1e-12;
  });

  run("C08", "Chaos game stays in and fills the triangle", Source::Derived, [&](CheckResult& c) {
    const PointSet cloud = chaos_game(s, {0.3, 0.3}, detail::standard_orbit());
    double outside = 0.0;
    for (const auto& p : cloud) outside = std::max(outside, detail::barycentric_violation(p));
    const double h = hausdorff_distance(cloud.points(), detail::triangle_raster());
    c.expected = "all points in triangle (1e-9); Hausdorff to 0.01 raster <= 0.02";
    c.measured = "max barycentric violation " + fmt(outside, 3) + "; Hausdorff " + fmt(h, 6) + " (" +
                 std::to_string(cloud.size()) + " points)";
    c.tolerance = 0.02;
    c.passed = outside <= 1e-9 && h <= c.tolerance;
  });

  run("C09", "Semiattractor estimate from starts outside the triangle", Source::Derived, [&](CheckResult& c) {
    const PointSet est = estimate_semiattractor(s, detail::triangle_starts(), detail::standard_orbit(), 0.02);
    const double h = est.empty() ? std::numeric_limits<double>::infinity()
                                 : hausdorff_distance(est.points(), detail::triangle_raster());
    c.expected = "Hausdorff to triangle raster <= 0.05";
    c.measured = "Hausdorff " + fmt(h, 6) + " (" + std::to_string(est.size()) + " points)";
    c.tolerance = 0.05;
    c.passed = h <= c.tolerance;
  });

  run("C10", "Invariance residual of the uniform measure on the triangle", Source::Derived, [&](CheckResult& c) {
    std::vector<double> res;
    double escaped = 0.0;
    for (std::size_t m : {64u, 128u, 256u}) {
      const GridMeasure u = uniform_on_polygon(tri, bounds, m);
      const GridMeasure mu = markov_step(s, u);
      res.push_back(total_variation(mu, u));
      escaped = std::max(escaped, mu.escaped_mass());
    }
    c.expected = "residual(256) <= 0.02; residual(2m) <= 0.75 residual(m); escaped <= 1e-6";
    c.measured = "residuals " + fmt(res[0], 6) + ", " + fmt(res[1], 6) + ", " + fmt(res[2], 6) + "; escaped " + fmt(escaped, 3);
    c.tolerance = 0.02;
    c.passed = res[2] <= c.tolerance && res[1] <= 0.75 * res[0] && res[2] <= 0.75 * res[1] && escaped <= 1e-6;
  });

  run("C11", "Markov iterates converge to the uniform measure on the triangle", Source::Derived, [&](CheckResult& c) {
    const GridMeasure u = uniform_on_polygon(tri, bounds, 256);
    const auto from_point = iterate_to_invariance(s, GridMeasure::point_mass(bounds, 256, {0.3, 0.3}), 1e-3, 500);
    const auto from_box = iterate_to_invariance(s, GridMeasure::uniform(bounds, 256), 1e-3, 500);
    const double tv_point = total_variation(from_point.measure, u);
    const double tv_box = total_variation(from_box.measure, u);
    c.expected = "TV to uniform-on-triangle <= 0.05 from both starts";
    c.measured = "point start " + fmt(tv_point, 6) + " (" + std::to_string(from_point.report.iterations) +
                 " steps); uniform-on-bounds start " + fmt(tv_box, 6) + " (" +
                 std::to_string(from_box.report.iterations) + " steps, escaped " + fmt(from_box.measure.escaped_mass(), 6) + ")";
    c.tolerance = 0.05;
    c.passed = tv_point <= c.tolerance && tv_box <= c.tolerance;
  });

  run("C12", "Shear pair: Lipschitz list, semiattractor and Dirac limit", facts.shear.semiattractor.source,
      [&](CheckResult& c) {
        const NamedSystem fe = shear_pair();
        const IfsSystem it = iterate_system(fe.system, 2);
        double worst = 0.0;
        std::string lips;
        for (std::size_t i = 0; i < 4; ++i) {
          const double lip = lipschitz(it.maps()[i]);
          worst = std::max(worst, std::abs(lip - facts.shear.lip_k2[i].value));
          lips += (i ? ", " : "") + fmt(lip);
        }
        const PointSet est = estimate_semiattractor(fe.system, {{0.0, 0.0}, {3.0, 3.0}}, detail::standard_orbit(), 0.02);
        double far = est.empty() ? std::numeric_limits<double>::infinity() : 0.0;
        for (const auto& p : est) far = std::max(far, distance(p, facts.shear.semiattractor.value));
        const auto run = iterate_to_invariance(
            fe.system, uniform_on_polygon(ConvexPolygon::box(0.0, 1.0, 0.0, 1.0), bounds, 256), 1e-3, 500);
        const double near = run.measure.mass_within(facts.shear.semiattractor.value, 0.05);
        c.expected = "Lip list 1, 0.5, 0.5, 1; semiattractor within 1e-3 of " + fmt(facts.shear.semiattractor.value) +
                     "; mass within 0.05 >= 0.99";
        c.measured = "Lip list " + lips + "; semiattractor spread " + fmt(far, 3) + "; mass " + fmt(near, 8);
        c.tolerance = 1e-12;
        c.passed = worst <= c.tolerance && far <= 1e-3 && near >= 0.99;
      });

  run("C13", "Semiattractors of the system and its second iterate agree", Source::Derived, [&](CheckResult& c) {
    const double eps = 0.02;
    const PointSet a = estimate_semiattractor(s, detail::triangle_starts(), detail::standard_orbit(), eps);
    const PointSet b = estimate_semiattractor(iterate_system(s, 2), detail::triangle_starts(), detail::standard_orbit(), eps);
    const double h = a.empty() || b.empty() ? std::numeric_limits<double>::infinity() : hausdorff_distance(a, b);
    c.expected = "Hausdorff <= 3 eps = 0.06";
    c.measured = "Hausdorff " + fmt(h, 6);
    c.tolerance = 3 * eps;
    c.passed = h <= c.tolerance;
  });

  run("C14", "Property suites", Source::Definition, [&](CheckResult& c) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto rmat = [&] { return Mat2{u(rng), u(rng), u(rng), u(rng)}; };
    auto rmap = [&] { return AffineMap{rmat(), {u(rng), u(rng)}}; };
    double norm_err = 0.0, hom_err = 0.0, tri_slack = 0.0, sym_err = 0.0, mass_err = 0.0;
    for (int i = 0; i < property_samples; ++i) {
      const Mat2 a = rmat();
      const double sn = spectral_norm(a);
      norm_err = std::max(norm_err, std::abs(detail::power_iteration_norm(a) - sn) / std::max(sn, 1e-300));
      const double sampled = detail::sampled_operator_norm(a, 10000, rng);
      norm_err = std::max(norm_err, std::abs(sampled - sn) / std::max(sn, 1e-300));
      const AffineMap f = rmap(), g = rmap();
      const AffineMap fg = compose(f, g);
      const Vec2 v{u(rng), u(rng)};
      hom_err = std::max({hom_err, distance(fg(v), f(g(v))),
                          std::abs(determinant(fg.linear) - determinant(f.linear) * determinant(g.linear)),
                          std::max(0.0, lipschitz(fg) - lipschitz(f) * lipschitz(g))});
    }
    for (int i = 0; i < property_samples / 10; ++i) {
      std::vector<Vec2> sets[3];
      for (auto& set : sets)
        for (int k = 0; k < 20; ++k) set.push_back({u(rng), u(rng)});
      const double ab = hausdorff_distance(sets[0], sets[1]), ba = hausdorff_distance(sets[1], sets[0]);
      const double bc = hausdorff_distance(sets[1], sets[2]), ac = hausdorff_distance(sets[0], sets[2]);
      sym_err = std::max(sym_err, std::abs(ab - ba));
      tri_slack = std::max(tri_slack, ac - (ab + bc));
    }
    GridMeasure mu = GridMeasure::uniform(bounds, 64);
    for (int i = 0; i < 5; ++i) {
      mu = markov_step(s, mu);
      mass_err = std::max(mass_err, std::abs(mu.total_mass() - 1.0));
    }
    c.expected = "norm oracles agree (1e-10 rel); homomorphisms (1e-12); Hausdorff symmetric, triangle ineq; mass 1e-12";
    c.measured = "norm " + fmt(norm_err, 3) + "; hom " + fmt(hom_err, 3) + "; symmetry " + fmt(sym_err, 3) +
                 "; triangle slack " + fmt(tri_slack, 3) + "; mass " + fmt(mass_err, 3) + " (" +
                 std::to_string(property_samples) + " samples)";
    c.tolerance = 1e-10;
    c.passed = norm_err <= 1e-10 && hom_err <= 1e-12 && sym_err == 0.0 && tri_slack <= 1e-12 && mass_err <= 1e-12;
  });

  return report;
}

}  // namespace ifs
