#pragma once

// JSON renderings of analysis, fibre and verification reports.

#include <string>

#include "json.hpp"

#include "ifs/analysis.hpp"
#include "ifs/fibres.hpp"
#include "ifs/verify.hpp"

namespace ifs {

inline nlohmann::json to_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }

inline std::string_view to_string(CriticalProbability::Kind k) noexcept {
  switch (k) {
    case CriticalProbability::Kind::Threshold: return "threshold";
    case CriticalProbability::Kind::AlwaysContractive: return "always_contractive";
    case CriticalProbability::Kind::NeverContractive: return "never_contractive";
  }
  return "unknown";
}

inline nlohmann::json to_json(const AnalysisReport& r) {
  using nlohmann::json;
  json j;
  j["map_lipschitz"] = r.map_lipschitz;
  j["uniform_probabilities_substituted"] = r.uniform_substituted;
  json its = json::array();
  for (const auto& st : r.iterates) {
    json e{{"k", st.k}, {"average_contractivity", st.average}, {"contractive_on_average", st.average < 1.0}};
    if (st.critical) {
      e["critical_p1"] = {{"kind", to_string(st.critical->kind)}};
      if (st.critical->has_threshold()) e["critical_p1"]["value"] = st.critical->value;
    }
    its.push_back(std::move(e));
  }
  j["iterates"] = std::move(its);
  j["min_contractive_k"] = r.min_contractive_k ? json(*r.min_contractive_k) : json(nullptr);
  if (r.contractive_word)
    j["contractive_word"] = {{"word", r.contractive_word->word.letters}, {"lipschitz", r.contractive_word->lipschitz}};
  else
    j["contractive_word"] = nullptr;
  return j;
}

inline nlohmann::json to_json(const FibreClass& c) {
  nlohmann::json j{{"class", FibreClass::name(c.kind)}};
  if (c.kind == FibreClass::Kind::Point) j["point"] = to_json(c.point);
  if (c.kind == FibreClass::Kind::Segment) j["segment"] = {to_json(c.from), to_json(c.to)};
  return j;
}

inline nlohmann::json to_json(const FibreSequence& seq, const FibreClass& cls) {
  using nlohmann::json;
  json j{{"address", seq.address.str()},
         {"depth", seq.steps.empty() ? 0 : seq.steps.back().depth},
         {"truncated", seq.truncated}};
  j.update(to_json(cls));
  json table = json::array();
  for (const auto& st : seq.steps) {
    json verts = json::array();
    for (const auto& v : st.polygon.vertices()) verts.push_back(to_json(v));
    table.push_back({{"depth", st.depth}, {"area", st.area}, {"diameter", st.diameter}, {"vertices", std::move(verts)}});
  }
  j["decay"] = std::move(table);
  return j;
}

inline nlohmann::json to_json(const StronglyFibredReport& r) {
  using nlohmann::json;
  json j;
  j["verdict"] = r.verdict == StronglyFibredReport::Verdict::StronglyFibred ? "strongly_fibred" : "inconclusive";
  if (r.witness_word) {
    j["witness"] = {{"word", r.witness_word->word.letters},
                    {"lipschitz", r.witness_word->lipschitz},
                    {"address", r.witness_address->str()}};
    if (r.singleton) j["witness"]["singleton"] = to_json(*r.singleton);
  }
  j["point_fibred"] = r.point_fibred_falsified ? "falsified" : "not_falsified";
  if (r.segment_witness) j["segment_witness"] = r.segment_witness->str();
  json fibres = json::array();
  for (const auto& f : r.constant_fibres) {
    json e{{"address", f.sequence.address.str()}, {"depth", f.sequence.steps.back().depth}};
    e.update(to_json(f.cls));
    fibres.push_back(std::move(e));
  }
  j["constant_fibres"] = std::move(fibres);
  return j;
}

inline nlohmann::json to_json(const VerifyReport& r) {
  using nlohmann::json;
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id},
                      {"title", c.title},
                      {"source", to_string(c.source)},
                      {"expected", c.expected},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"status", c.passed ? "PASS" : "FAIL"},
                      {"seconds", c.seconds}});
  return {{"scale", r.scale == Scale::Full ? "full" : "quick"},
          {"passed", r.all_passed()},
          {"failures", r.failures()},
          {"checks", std::move(checks)}};
}

}  // namespace ifs
