#pragma once

// Iterated function systems of affine maps: word composition, k-th
// iterates, average contractivity and the searches built on it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"

namespace ifs {

inline constexpr double kProbabilitySumTolerance = 1e-12;
inline constexpr std::size_t kDefaultMaxMaps = std::size_t{1} << 20;

/// Finite sequence of 1-based map indices.
struct Word {
  std::vector<unsigned> letters;

  Word() = default;
  Word(std::initializer_list<unsigned> l) : letters(l) {}
  explicit Word(std::vector<unsigned> l) : letters(std::move(l)) {}

  std::size_t size() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }
  unsigned operator[](std::size_t i) const { return letters[i]; }

  std::string str() const {
    std::string s;
    for (unsigned l : letters) {
      if (!s.empty() && l > 9) s += ',';
      s += std::to_string(l);
    }
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;
};

/// Ordered list of affine maps with an optional probability vector.
class IfsSystem {
 public:
  explicit IfsSystem(std::vector<AffineMap> maps,
                     std::optional<std::vector<double>> probs = std::nullopt)
      : maps_(std::move(maps)), probs_(std::move(probs)) {
    if (maps_.empty()) throw Error(Errc::InvalidArgument, "system needs at least one map");
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (!is_finite(maps_[i].linear) || !is_finite(maps_[i].offset))
        throw Error(Errc::InvalidArgument, "map " + std::to_string(i + 1) + " has a non-finite entry");
    }
    if (probs_) validate_probabilities(*probs_, maps_.size());
  }

  std::size_t size() const noexcept { return maps_.size(); }
  const std::vector<AffineMap>& maps() const noexcept { return maps_; }
  const AffineMap& map(unsigned index) const {
    if (index < 1 || index > maps_.size())
      throw Error(Errc::InvalidIndex, "map index " + std::to_string(index) + " outside 1.." +
                                          std::to_string(maps_.size()));
    return maps_[index - 1];
  }

  bool has_probabilities() const noexcept { return probs_.has_value(); }
  const std::optional<std::vector<double>>& probabilities() const noexcept { return probs_; }

  IfsSystem with_probabilities(std::vector<double> probs) const {
    return IfsSystem(maps_, std::move(probs));
  }
  IfsSystem without_probabilities() const { return IfsSystem(maps_); }
  IfsSystem with_uniform_probabilities() const {
    return IfsSystem(maps_, std::vector<double>(maps_.size(), 1.0 / double(maps_.size())));
  }

  /// Probabilities, throwing if absent or (when `strict`) not all positive.
  const std::vector<double>& require_probabilities(bool strict) const {
    if (!probs_) throw Error(Errc::MissingProbabilities, "system has no probability vector");
    if (strict) {
      for (std::size_t i = 0; i < probs_->size(); ++i)
        if (!((*probs_)[i] > 0.0))
          throw Error(Errc::NonpositiveProbability,
                      "p" + std::to_string(i + 1) + " = " + std::to_string((*probs_)[i]));
    }
    return *probs_;
  }

  static void validate_probabilities(const std::vector<double>& p, std::size_t n) {
    if (p.size() != n)
      throw Error(Errc::InvalidProbability, "expected " + std::to_string(n) +
                                                " probabilities, got " + std::to_string(p.size()));
    double sum = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0)
        throw Error(Errc::InvalidProbability, "probability " + std::to_string(v) + " is negative or not finite");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
      throw Error(Errc::InvalidProbability, "probabilities sum to " + std::to_string(sum));
  }

 private:
  struct Unchecked {};
  IfsSystem(Unchecked, std::vector<AffineMap> maps, std::optional<std::vector<double>> probs)
      : maps_(std::move(maps)), probs_(std::move(probs)) {}

  friend IfsSystem iterate_system(const IfsSystem&, unsigned, std::size_t);

  std::vector<AffineMap> maps_;
  std::optional<std::vector<double>> probs_;
};

/// f_{w1} o f_{w2} o ... o f_{wn}: the first letter is applied last.
inline AffineMap compose_word(const IfsSystem& s, const Word& w) {
  if (w.empty()) throw Error(Errc::InvalidIndex, "empty word");
  AffineMap result = s.map(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i) result = compose(result, s.map(w[i]));
  return result;
}

namespace detail {

inline std::size_t checked_word_count(std::size_t n, unsigned k, std::size_t cap) {
  std::size_t count = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (count > cap / n)
      throw Error(Errc::SizeLimit, std::to_string(n) + "^" + std::to_string(k) +
                                       " words exceed the cap of " + std::to_string(cap));
    count *= n;
  }
  return count;
}

/// Word number `index` (0-based) in lexicographic order of I^k.
inline Word word_at(std::size_t index, std::size_t n, unsigned k) {
  std::vector<unsigned> letters(k);
  for (unsigned i = k; i-- > 0;) {
    letters[i] = static_cast<unsigned>(index % n) + 1;
    index /= n;
  }
  return Word(std::move(letters));
}

/// Maps f_w for every w in I^k, lexicographic order.
inline std::vector<AffineMap> word_maps(const IfsSystem& s, unsigned k, std::size_t cap) {
  const std::size_t n = s.size();
  checked_word_count(n, k, cap);
  std::vector<AffineMap> level = s.maps();
  for (unsigned depth = 1; depth < k; ++depth) {
    std::vector<AffineMap> next;
    next.reserve(level.size() * n);
    for (const auto& prefix : level)
      for (const auto& f : s.maps()) next.push_back(compose(prefix, f));
    level = std::move(next);
  }
  return level;
}

}  // namespace detail

/// The k-th iterate system: all f_w for w in I^k (lexicographic), with
/// product probabilities when the system carries them.
inline IfsSystem iterate_system(const IfsSystem& s, unsigned k, std::size_t max_maps = kDefaultMaxMaps) {
  if (k < 1) throw Error(Errc::InvalidArgument, "iterate order must be >= 1");
  if (k == 1) return s;
  auto maps = detail::word_maps(s, k, max_maps);
  std::optional<std::vector<double>> probs;
  if (s.has_probabilities()) {
    const auto& p = *s.probabilities();
    std::vector<double> level = p;
    for (unsigned depth = 1; depth < k; ++depth) {
      std::vector<double> next;
      next.reserve(level.size() * p.size());
      for (double a : level)
        for (double b : p) next.push_back(a * b);
      level = std::move(next);
    }
    probs = std::move(level);
  }
  return IfsSystem(IfsSystem::Unchecked{}, std::move(maps), std::move(probs));
}

/// Sum over words w of length k of p_w * Lip(f_w). Values below 1 mean the
/// k-th iterate is contractive on average.
inline double average_contractivity(const IfsSystem& s, unsigned k, std::size_t max_maps = kDefaultMaxMaps) {
  s.require_probabilities(true);
  if (k < 1) throw Error(Errc::InvalidArgument, "iterate order must be >= 1");
  const IfsSystem it = iterate_system(s, k, max_maps);
  const auto& p = *it.probabilities();
  double total = 0.0;
  for (std::size_t i = 0; i < it.size(); ++i) total += p[i] * lipschitz(it.maps()[i]);
  return total;
}

/// Smallest k <= max_k whose iterate is contractive on average. Absence only
/// means none was found up to max_k.
inline std::optional<unsigned> min_average_contractive_k(const IfsSystem& s, unsigned max_k,
                                                         std::size_t max_maps = kDefaultMaxMaps) {
  for (unsigned k = 1; k <= max_k; ++k)
    if (average_contractivity(s, k, max_maps) < 1.0) return k;
  return std::nullopt;
}

struct ContractiveWord {
  Word word;
  double lipschitz = 0.0;
};

inline constexpr double kContractionMargin = 1e-12;

/// Shortest word whose composition has Lipschitz constant below 1. Within
/// a length, constant words i i ... i are tried first (their periodic
/// address is a constant one), then the rest in lexicographic order.
inline std::optional<ContractiveWord> find_contractive_word(const IfsSystem& s, unsigned max_len,
                                                            std::size_t max_maps = kDefaultMaxMaps) {
  const std::size_t n = s.size();
  for (unsigned len = 1; len <= max_len; ++len) {
    const std::size_t count = detail::checked_word_count(n, len, max_maps);
    for (unsigned letter = 1; letter <= n; ++letter) {
      Word w(std::vector<unsigned>(len, letter));
      const double lip = lipschitz(compose_word(s, w));
      if (lip < 1.0 - kContractionMargin) return ContractiveWord{std::move(w), lip};
    }
    for (std::size_t idx = 0; idx < count; ++idx) {
      Word w = detail::word_at(idx, n, len);
      const double lip = lipschitz(compose_word(s, w));
      if (lip < 1.0 - kContractionMargin) return ContractiveWord{std::move(w), lip};
    }
  }
  return std::nullopt;
}

struct CriticalProbability {
  enum class Kind { Threshold, AlwaysContractive, NeverContractive };
  Kind kind = Kind::NeverContractive;
  /// Supremum of contractive p1 when kind == Threshold.
  double value = 0.0;
  int iterations = 0;

  bool has_threshold() const noexcept { return kind == Kind::Threshold; }
};

inline constexpr double kBisectionTolerance = 1e-10;
inline constexpr int kBisectionMaxIterations = 200;

/// Average contractivity of the k-th iterate of a two-map system as a
/// polynomial in p1; per-word Lipschitz constants are computed once.
class TwoMapAverage {
 public:
  TwoMapAverage(const IfsSystem& s, unsigned k, std::size_t max_maps = kDefaultMaxMaps) : k_(k) {
    if (s.size() != 2)
      throw Error(Errc::WrongArity, "critical probability needs exactly two maps, got " +
                                        std::to_string(s.size()));
    if (k < 1) throw Error(Errc::InvalidArgument, "iterate order must be >= 1");
    const auto maps = detail::word_maps(s, k, max_maps);
    // Lipschitz sums grouped by how many letters of the word are 1.
    lip_by_ones_.assign(k + 1, 0.0);
    for (std::size_t idx = 0; idx < maps.size(); ++idx) {
      unsigned ones = 0;
      std::size_t rest = idx;
      for (unsigned i = 0; i < k; ++i, rest /= 2) ones += (rest % 2 == 0);
      lip_by_ones_[ones] += lipschitz(maps[idx]);
    }
  }

  double operator()(double p1) const {
    const double p2 = 1.0 - p1;
    double total = 0.0;
    for (unsigned ones = 0; ones <= k_; ++ones)
      total += lip_by_ones_[ones] * std::pow(p1, ones) * std::pow(p2, k_ - ones);
    return total;
  }

 private:
  unsigned k_;
  std::vector<double> lip_by_ones_;
};

/// Supremum of p1 in [0,1] for which the k-th iterate of a two-map system is
/// contractive on average, located by a coarse scan then bisection.
inline CriticalProbability critical_probability(const IfsSystem& s, unsigned k,
                                                std::size_t max_maps = kDefaultMaxMaps) {
  const TwoMapAverage avg(s, k, max_maps);
  constexpr int kScan = 1000;
  std::optional<int> last_feasible;
  bool all_feasible = true;
  for (int i = 0; i <= kScan; ++i) {
    if (avg(double(i) / kScan) < 1.0)
      last_feasible = i;
    else
      all_feasible = false;
  }
  CriticalProbability out;
  if (all_feasible) {
    out.kind = CriticalProbability::Kind::AlwaysContractive;
    return out;
  }
  if (!last_feasible) {
    out.kind = CriticalProbability::Kind::NeverContractive;
    return out;
  }
  out.kind = CriticalProbability::Kind::Threshold;
  if (*last_feasible == kScan) {
    out.value = 1.0;
    return out;
  }
  double lo = double(*last_feasible) / kScan;
  double hi = double(*last_feasible + 1) / kScan;
  int it = 0;
  while (hi - lo > kBisectionTolerance && it < kBisectionMaxIterations) {
    const double mid = 0.5 * (lo + hi);
    (avg(mid) < 1.0 ? lo : hi) = mid;
    ++it;
  }
  out.value = 0.5 * (lo + hi);
  out.iterations = it;
  return out;
}

}  // namespace ifs
