#pragma once

#include <optional>
#include <vector>

#include "ifs/system.hpp"

namespace ifs {

struct IterateStat {
  unsigned k = 0;
  double average = 0.0;
  std::optional<CriticalProbability> critical;  ///< two-map systems only
};

struct AnalysisReport {
  std::vector<double> map_lipschitz;
  bool uniform_substituted = false;  ///< system had no probabilities
  std::vector<IterateStat> iterates;
  std::optional<unsigned> min_contractive_k;
  std::optional<ContractiveWord> contractive_word;
};

/// Contractivity summary for k = 1..max_k. A missing min_contractive_k only
/// says nothing was found up to max_k.
inline AnalysisReport analyze(const IfsSystem& s, unsigned max_k, unsigned max_word_len,
                              std::size_t max_maps = kDefaultMaxMaps) {
  AnalysisReport r;
  for (const auto& f : s.maps()) r.map_lipschitz.push_back(lipschitz(f));
  const IfsSystem sys = s.has_probabilities() ? s : s.with_uniform_probabilities();
  r.uniform_substituted = !s.has_probabilities();
  for (unsigned k = 1; k <= max_k; ++k) {
    IterateStat st{k, average_contractivity(sys, k, max_maps), std::nullopt};
    if (s.size() == 2) st.critical = critical_probability(s, k, max_maps);
    if (!r.min_contractive_k && st.average < 1.0) r.min_contractive_k = k;
    r.iterates.push_back(st);
  }
  r.contractive_word = find_contractive_word(s, max_word_len, max_maps);
  return r;
}

}  // namespace ifs
