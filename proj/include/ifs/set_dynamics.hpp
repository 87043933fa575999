#pragma once

// Compact-set dynamics on finite point clouds: Hutchinson steps, the chaos
// game and a finite-start estimator of the semiattractor.
//
// The chaos game applies the newest map on the left, x_{n+1} = f_{i_n}(x_n),
// so after n steps the orbit point is f_{i_n} o ... o f_{i_1}(x_0); words
// elsewhere in the library read the other way round. Stationary statistics
// do not depend on this.

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"
#include "ifs/point_set.hpp"
#include "ifs/system.hpp"

namespace ifs {

/// F(S) = union of f_i(S), deduplicated at S's resolution. Map-major order.
inline PointSet hutchinson_step(const IfsSystem& s, const PointSet& S) {
  if (S.empty()) throw Error(Errc::EmptyInput, "Hutchinson step of an empty set");
  PointSet out(S.resolution());
  for (const auto& f : s.maps())
    for (const auto& x : S) out.insert(f(x));
  return out;
}

struct OrbitConfig {
  std::uint64_t burn_in = 100;
  std::uint64_t samples = 100000;
  std::uint64_t rng_seed = 0;
  std::uint64_t chunk_count = 1;
};

inline constexpr double kDivergenceBound = 1e12;
inline constexpr std::uint64_t kChunkSeedMultiplier = 0x9E3779B97F4A7C15ull;

/// Seed of chunk c: seed XOR (c * golden-ratio constant).
constexpr std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept {
  return seed ^ (chunk * kChunkSeedMultiplier);
}

/// Draws map indices (0-based) with the system's probabilities, using the
/// top 53 bits of a 64-bit Mersenne Twister draw.
class MapSampler {
 public:
  explicit MapSampler(const std::vector<double>& probs) {
    double acc = 0.0;
    for (double p : probs) cumulative_.push_back(acc += p);
    // The last bucket absorbs rounding so every draw maps somewhere.
    cumulative_.back() = 2.0;
  }

  std::size_t operator()(std::mt19937_64& rng) const noexcept {
    const double u = double(rng() >> 11) * 0x1.0p-53;
    std::size_t i = 0;
    while (u >= cumulative_[i]) ++i;
    return i;
  }

 private:
  std::vector<double> cumulative_;
};

namespace detail {

inline std::vector<Vec2> run_orbit(const IfsSystem& s, const MapSampler& pick, Vec2 start,
                                   std::uint64_t burn_in, std::uint64_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& maps = s.maps();
  std::vector<Vec2> out;
  out.reserve(count);
  Vec2 x = start;
  for (std::uint64_t n = 0; n < burn_in + count; ++n) {
    x = maps[pick(rng)](x);
    if (!(std::abs(x.x) <= kDivergenceBound && std::abs(x.y) <= kDivergenceBound))
      throw Error(Errc::DivergedOrbit, "orbit left the box |coord| <= 1e12 after " + std::to_string(n + 1) + " steps");
    if (n >= burn_in) out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// Random orbit with i.i.d. map choices. The samples are split across
/// `chunk_count` independent orbits, each restarting from `start` with its
/// own burn-in and seed chunk_seed(rng_seed, c); chunk outputs are merged in
/// chunk order, so the result depends only on the configuration.
inline PointSet chaos_game(const IfsSystem& s, Vec2 start, const OrbitConfig& cfg, double resolution = 0.0) {
  const auto& probs = s.require_probabilities(true);
  if (cfg.samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
  if (cfg.chunk_count < 1) throw Error(Errc::InvalidArgument, "chunk_count must be >= 1");
  if (!is_finite(start)) throw Error(Errc::InvalidArgument, "start point is not finite");
  const MapSampler pick(probs);
  const std::uint64_t chunks = std::min(cfg.chunk_count, cfg.samples);
  std::vector<std::future<std::vector<Vec2>>> parts;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t count = cfg.samples / chunks + (c < cfg.samples % chunks ? 1 : 0);
    const auto policy = chunks > 1 ? std::launch::async : std::launch::deferred;
    parts.push_back(std::async(policy, [&, c, count] {
      return detail::run_orbit(s, pick, start, cfg.burn_in, count, chunk_seed(cfg.rng_seed, c));
    }));
  }
  PointSet out(resolution);
  for (auto& part : parts)
    for (const auto& p : part.get()) out.insert(p);
  return out;
}

/// Approximates the semiattractor as the part of the first start's
/// chaos-game cloud lying within eps of every other start's cloud. Start k
/// uses seed rng_seed + k. Missing probabilities are replaced by uniform
/// ones. Finitely many starts can only over-approximate.
inline PointSet estimate_semiattractor(const IfsSystem& s, const std::vector<Vec2>& starts,
                                       const OrbitConfig& cfg, double eps) {
  if (starts.empty()) throw Error(Errc::EmptyInput, "at least one start point is required");
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "eps must be positive");
  const IfsSystem sys = s.has_probabilities() ? s : s.with_uniform_probabilities();
  auto cloud_from = [&](std::size_t k) {
    OrbitConfig c = cfg;
    c.rng_seed = cfg.rng_seed + k;
    return chaos_game(sys, starts[k], c, eps);
  };
  PointSet first = cloud_from(0);
  std::vector<Vec2> kept = first.points();
  for (std::size_t k = 1; k < starts.size(); ++k) {
    const PointSet other = cloud_from(k);
    const NearestIndex index(other.points());
    std::vector<Vec2> next;
    for (const auto& p : kept)
      if (index.distance_to(p) <= eps) next.push_back(p);
    kept = std::move(next);
  }
  return PointSet(kept, eps);
}

}  // namespace ifs
