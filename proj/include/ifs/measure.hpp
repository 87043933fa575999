#pragma once

// Grid-discretised probability measures and the Markov operator
// M mu = sum_i p_i mu o f_i^{-1}, implemented by pushing each cell's mass
// forward from its centre. Total variation on the grid stands in for weak
// convergence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"
#include "ifs/point_set.hpp"
#include "ifs/polygon.hpp"
#include "ifs/system.hpp"

namespace ifs {

struct Box {
  double xmin = -0.25;
  double xmax = 1.25;
  double ymin = -0.25;
  double ymax = 1.25;

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  bool valid() const noexcept {
    return std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) && std::isfinite(ymax) &&
           xmax > xmin && ymax > ymin;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Mass on an m x m grid over `bounds`, plus whatever was pushed outside.
/// Cell (i, j) has x-index i, y-index j and is stored at j * m + i.
class GridMeasure {
 public:
  GridMeasure(Box bounds, std::size_t m) : bounds_(bounds), m_(m), mass_(m * m, 0.0) {
    if (!bounds.valid()) throw Error(Errc::InvalidArgument, "grid bounds must be finite with max > min");
    if (m < 2) throw Error(Errc::InvalidArgument, "grid resolution must be >= 2");
  }

  static GridMeasure point_mass(Box bounds, std::size_t m, Vec2 at) {
    GridMeasure g(bounds, m);
    const auto c = g.cell_of(at);
    if (!c) throw Error(Errc::InvalidArgument, "point mass location lies outside the grid");
    g.mass_[*c] = 1.0;
    return g;
  }

  static GridMeasure uniform(Box bounds, std::size_t m) {
    GridMeasure g(bounds, m);
    std::fill(g.mass_.begin(), g.mass_.end(), 1.0 / double(m * m));
    return g;
  }

  const Box& bounds() const noexcept { return bounds_; }
  std::size_t resolution() const noexcept { return m_; }
  double cell_width() const noexcept { return bounds_.width() / double(m_); }
  double cell_height() const noexcept { return bounds_.height() / double(m_); }

  const std::vector<double>& mass() const noexcept { return mass_; }
  std::vector<double>& mass() noexcept { return mass_; }
  double mass(std::size_t i, std::size_t j) const { return mass_[j * m_ + i]; }
  double escaped_mass() const noexcept { return escaped_; }
  void set_escaped_mass(double e) noexcept { escaped_ = e; }

  double grid_mass() const noexcept { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }
  double total_mass() const noexcept { return grid_mass() + escaped_; }
  double max_cell_mass() const noexcept { return *std::max_element(mass_.begin(), mass_.end()); }

  Vec2 center(std::size_t i, std::size_t j) const noexcept {
    return {bounds_.xmin + (double(i) + 0.5) * cell_width(), bounds_.ymin + (double(j) + 0.5) * cell_height()};
  }
  Vec2 center(std::size_t flat) const noexcept { return center(flat % m_, flat / m_); }

  /// Flat index of the cell containing p (half-open cells), if inside.
  std::optional<std::size_t> cell_of(Vec2 p) const noexcept {
    const double fx = (p.x - bounds_.xmin) / cell_width();
    const double fy = (p.y - bounds_.ymin) / cell_height();
    if (!(fx >= 0.0 && fy >= 0.0 && fx < double(m_) && fy < double(m_))) return std::nullopt;
    return static_cast<std::size_t>(fy) * m_ + static_cast<std::size_t>(fx);
  }

  bool same_grid(const GridMeasure& o) const noexcept { return bounds_ == o.bounds_ && m_ == o.m_; }

  /// Mass of cells whose centre lies within `radius` of p.
  double mass_within(Vec2 p, double radius) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < mass_.size(); ++k)
      if (distance(center(k), p) <= radius) s += mass_[k];
    return s;
  }

 private:
  Box bounds_;
  std::size_t m_;
  std::vector<double> mass_;
  double escaped_ = 0.0;
};

enum class Deposit {
  NearestCell,  ///< all mass to the cell containing the image of the centre
  Bilinear,     ///< split over the four nearest cell centres
};

namespace detail {

/// Pushes the mass of source cells [lo, hi) forward into `dst`; returns the
/// mass that left the grid.
inline double push_forward(const IfsSystem& s, const std::vector<double>& probs, const GridMeasure& mu,
                           std::size_t lo, std::size_t hi, Deposit deposit, std::vector<double>& dst) {
  const std::size_t m = mu.resolution();
  const double w = mu.cell_width(), h = mu.cell_height();
  const Box& b = mu.bounds();
  double escaped = 0.0;
  for (std::size_t k = lo; k < hi; ++k) {
    const double mk = mu.mass()[k];
    if (mk == 0.0) continue;
    const Vec2 c = mu.center(k);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double share = probs[i] * mk;
      if (share == 0.0) continue;
      const Vec2 y = s.maps()[i](c);
      if (deposit == Deposit::NearestCell) {
        if (const auto cell = mu.cell_of(y))
          dst[*cell] += share;
        else
          escaped += share;
        continue;
      }
      // Bilinear: weights relative to the lattice of cell centres.
      const double gx = (y.x - b.xmin) / w - 0.5;
      const double gy = (y.y - b.ymin) / h - 0.5;
      if (!std::isfinite(gx) || !std::isfinite(gy)) {
        escaped += share;
        continue;
      }
      const double fx = std::floor(gx), fy = std::floor(gy);
      const double tx = gx - fx, ty = gy - fy;
      const double weights[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
      const double ix[4] = {fx, fx + 1, fx, fx + 1};
      const double iy[4] = {fy, fy, fy + 1, fy + 1};
      for (int q = 0; q < 4; ++q) {
        const double part = share * weights[q];
        if (ix[q] >= 0 && iy[q] >= 0 && ix[q] < double(m) && iy[q] < double(m))
          dst[static_cast<std::size_t>(iy[q]) * m + static_cast<std::size_t>(ix[q])] += part;
        else
          escaped += part;
      }
    }
  }
  return escaped;
}

/// Source cells are split into this many slices regardless of core count,
/// so the summation order (and the result) never depends on the machine.
inline constexpr std::size_t kMarkovSlices = 8;
inline constexpr std::size_t kMarkovParallelCells = std::size_t{1} << 15;

}  // namespace detail

/// One application of the Markov operator. Large grids are processed in
/// parallel slices whose partial grids are summed in slice order.
inline GridMeasure markov_step(const IfsSystem& s, const GridMeasure& mu, Deposit deposit = Deposit::NearestCell) {
  const auto& probs = s.require_probabilities(false);
  GridMeasure out(mu.bounds(), mu.resolution());
  const std::size_t cells = mu.mass().size();
  if (cells < detail::kMarkovParallelCells) {
    const double escaped = detail::push_forward(s, probs, mu, 0, cells, deposit, out.mass());
    out.set_escaped_mass(mu.escaped_mass() + escaped);
    return out;
  }
  const std::size_t slices = detail::kMarkovSlices;
  std::vector<std::vector<double>> partial(slices);
  std::vector<std::future<double>> jobs;
  for (std::size_t t = 0; t < slices; ++t) {
    const std::size_t lo = cells * t / slices, hi = cells * (t + 1) / slices;
    partial[t].assign(cells, 0.0);
    jobs.push_back(std::async(std::launch::async, [&, t, lo, hi] {
      return detail::push_forward(s, probs, mu, lo, hi, deposit, partial[t]);
    }));
  }
  double escaped = mu.escaped_mass();
  auto& dst = out.mass();
  for (std::size_t t = 0; t < slices; ++t) {
    escaped += jobs[t].get();
    for (std::size_t k = 0; k < cells; ++k) dst[k] += partial[t][k];
  }
  out.set_escaped_mass(escaped);
  return out;
}

/// Half the l1 distance between the cell masses, escaped mass included.
inline double total_variation(const GridMeasure& mu, const GridMeasure& nu) {
  if (!mu.same_grid(nu)) throw Error(Errc::GridMismatch, "measures live on different grids");
  double s = 0.0;
  for (std::size_t k = 0; k < mu.mass().size(); ++k) s += std::abs(mu.mass()[k] - nu.mass()[k]);
  return 0.5 * s + 0.5 * std::abs(mu.escaped_mass() - nu.escaped_mass());
}

struct MarkovReport {
  std::size_t iterations = 0;
  std::vector<double> residuals;  ///< TV between successive iterates
  bool converged = false;
};

struct InvarianceResult {
  GridMeasure measure;
  MarkovReport report;
};

/// Applies the Markov operator until successive iterates are within `tol`
/// in total variation, or `max_iters` steps have run.
inline InvarianceResult iterate_to_invariance(const IfsSystem& s, GridMeasure mu, double tol, std::size_t max_iters,
                                              Deposit deposit = Deposit::NearestCell) {
  MarkovReport report;
  for (std::size_t it = 0; it < max_iters; ++it) {
    GridMeasure next = markov_step(s, mu, deposit);
    const double r = total_variation(next, mu);
    mu = std::move(next);
    report.residuals.push_back(r);
    report.iterations = it + 1;
    if (r < tol) {
      report.converged = true;
      break;
    }
  }
  return {std::move(mu), std::move(report)};
}

namespace detail {

/// True when the cell rectangle and the convex polygon share no interior
/// point (separating axis among box axes and polygon edge normals).
inline bool separated(const ConvexPolygon& p, double x0, double x1, double y0, double y1) {
  if (p.xmax() <= x0 || p.xmin() >= x1 || p.ymax() <= y0 || p.ymin() >= y1) return true;
  const auto& v = p.vertices();
  const Vec2 corners[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], e = v[(i + 1) % v.size()] - a;
    if (e == Vec2{}) continue;
    bool all_outside = true;
    for (const auto& c : corners)
      if (cross(e, c - a) > 0.0) {
        all_outside = false;
        break;
      }
    if (all_outside) return true;
  }
  return false;
}

}  // namespace detail

/// Normalised area measure of a convex polygon. Interior and exterior cells
/// are exact; boundary cells use the fraction of a 4x4 sub-sample inside.
inline GridMeasure uniform_on_polygon(const ConvexPolygon& poly, Box bounds, std::size_t m) {
  if (poly.size() < 3 || !(poly.area() > 1e-15))
    throw Error(Errc::DegeneratePolygon, "polygon has zero area");
  GridMeasure g(bounds, m);
  const double w = g.cell_width(), h = g.cell_height();
  auto& mass = g.mass();
  for (std::size_t j = 0; j < m; ++j) {
    const double y0 = bounds.ymin + double(j) * h, y1 = y0 + h;
    for (std::size_t i = 0; i < m; ++i) {
      const double x0 = bounds.xmin + double(i) * w, x1 = x0 + w;
      double frac;
      if (poly.contains(Vec2{x0, y0}) && poly.contains(Vec2{x1, y0}) && poly.contains(Vec2{x1, y1}) &&
          poly.contains(Vec2{x0, y1})) {
        frac = 1.0;
      } else if (detail::separated(poly, x0, x1, y0, y1)) {
        frac = 0.0;
      } else {
        int inside = 0;
        for (int sy = 0; sy < 4; ++sy)
          for (int sx = 0; sx < 4; ++sx)
            inside += poly.contains(Vec2{x0 + (sx + 0.5) * w / 4, y0 + (sy + 0.5) * h / 4});
        frac = inside / 16.0;
      }
      mass[j * m + i] = frac;
    }
  }
  const double total = g.grid_mass();
  if (!(total > 0.0)) throw Error(Errc::DegeneratePolygon, "polygon does not overlap the grid");
  for (auto& v : mass) v /= total;
  return g;
}

/// Centres of cells holding more than threshold * (largest cell mass).
inline PointSet support(const GridMeasure& mu, double threshold) {
  if (!(threshold >= 0.0)) throw Error(Errc::InvalidArgument, "support threshold must be >= 0");
  const double cut = threshold * mu.max_cell_mass();
  PointSet out(0.0);
  for (std::size_t k = 0; k < mu.mass().size(); ++k)
    if (mu.mass()[k] > cut) out.insert(mu.center(k));
  return out;
}

/// ASCII graymap (P2), 8-bit, scaled so the heaviest cell is 255. Top row
/// of the image is the largest y.
inline void write_pgm(std::ostream& os, const GridMeasure& mu) {
  const std::size_t m = mu.resolution();
  const double peak = mu.max_cell_mass();
  os << "P2\n" << m << ' ' << m << "\n255\n";
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t j = m - 1 - r;
    for (std::size_t i = 0; i < m; ++i) {
      const long v = peak > 0.0 ? std::lround(255.0 * mu.mass(i, j) / peak) : 0;
      os << v << (i + 1 < m ? ' ' : '\n');
    }
  }
}

/// CSV `cell_x_index,cell_y_index,mass` for every cell with nonzero mass.
inline void write_csv(std::ostream& os, const GridMeasure& mu) {
  const auto old = os.precision(17);
  os << "cell_x_index,cell_y_index,mass\n";
  const std::size_t m = mu.resolution();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (mu.mass(i, j) != 0.0) os << i << ',' << j << ',' << mu.mass(i, j) << '\n';
  os.precision(old);
}

}  // namespace ifs
