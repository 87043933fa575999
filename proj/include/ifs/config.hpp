#pragma once

// JSON system description:
//
//   {
//     "maps": [ {"A": [[1, 0.5], [0, 0.5]], "b": [0, 0], "p": 0.5}, ... ],
//     "invariant_hint": [[0, 0], [1, 0], [0, 1]],      (optional)
//     "bounds": [-0.25, 1.25, -0.25, 1.25]              (optional)
//   }
//
// Probabilities are all-or-nothing and must sum to 1 within 1e-9.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ifs/error.hpp"
#include "ifs/fibres.hpp"
#include "ifs/measure.hpp"
#include "ifs/polygon.hpp"
#include "ifs/system.hpp"

namespace ifs {

inline constexpr double kConfigProbabilityTolerance = 1e-9;

struct IfsConfig {
  IfsSystem system;
  std::optional<ConvexPolygon> invariant_hint;
  std::optional<Box> bounds;

  /// Explicit bounds, else the hint's bounding box padded by a quarter of
  /// its size on each side, else [-0.25, 1.25]^2.
  Box grid_bounds() const {
    if (bounds) return *bounds;
    if (invariant_hint) {
      const auto& h = *invariant_hint;
      const double px = 0.25 * (h.xmax() - h.xmin()), py = 0.25 * (h.ymax() - h.ymin());
      return {h.xmin() - px, h.xmax() + px, h.ymin() - py, h.ymax() + py};
    }
    return Box{};
  }
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void field_error(const std::string& field, const std::string& what) {
  throw Error(Errc::ParseError, "field '" + field + "': " + what);
}

inline double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number, got " + std::string(j.type_name()));
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(field, "number is not finite");
  return v;
}

inline std::vector<double> numbers_at(const json& j, const std::string& field, std::size_t n) {
  if (!j.is_array() || j.size() != n)
    field_error(field, "expected an array of " + std::to_string(n) + " numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(number_at(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
  }
}

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline IfsConfig parse_config(const std::string& text) {
  using detail::field_error;
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte);
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                      ": malformed JSON (" + e.what() + ")");
  }
  if (!root.is_object()) throw Error(Errc::ParseError, "top level must be an object");
  detail::reject_unknown(root, "", {"maps", "invariant_hint", "bounds"});
  if (!root.contains("maps")) field_error("maps", "required field missing");
  const json& maps = root["maps"];
  if (!maps.is_array() || maps.empty()) field_error("maps", "expected a nonempty array");

  std::vector<AffineMap> affine;
  std::vector<double> probs;
  std::size_t with_p = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string at = "maps[" + std::to_string(i) + "]";
    const json& m = maps[i];
    if (!m.is_object()) field_error(at, "expected an object with fields A, b and optional p");
    detail::reject_unknown(m, at, {"A", "b", "p"});
    if (!m.contains("A")) field_error(at + ".A", "required field missing");
    if (!m.contains("b")) field_error(at + ".b", "required field missing");
    const json& a = m["A"];
    if (!a.is_array() || a.size() != 2) field_error(at + ".A", "expected a 2x2 row-major array");
    const auto r0 = detail::numbers_at(a[0], at + ".A[0]", 2);
    const auto r1 = detail::numbers_at(a[1], at + ".A[1]", 2);
    const auto b = detail::numbers_at(m["b"], at + ".b", 2);
    affine.push_back({{r0[0], r0[1], r1[0], r1[1]}, {b[0], b[1]}});
    if (m.contains("p")) {
      const double p = detail::number_at(m["p"], at + ".p");
      if (p < 0.0) field_error(at + ".p", "probability must be >= 0");
      probs.push_back(p);
      ++with_p;
    }
  }
  std::optional<std::vector<double>> maybe_probs;
  if (with_p != 0) {
    if (with_p != maps.size()) field_error("maps[].p", "give a probability for every map or for none");
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > kConfigProbabilityTolerance)
      field_error("maps[].p", "probabilities sum to " + std::to_string(sum) + ", expected 1");
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
      for (double& p : probs) p /= sum;
    maybe_probs = std::move(probs);
  }
  IfsConfig cfg{IfsSystem(std::move(affine), std::move(maybe_probs)), std::nullopt, std::nullopt};

  if (root.contains("invariant_hint")) {
    const json& h = root["invariant_hint"];
    if (!h.is_array() || h.size() < 3) field_error("invariant_hint", "expected an array of at least 3 [x, y] vertices");
    std::vector<Vec2> verts;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto v = detail::numbers_at(h[i], "invariant_hint[" + std::to_string(i) + "]", 2);
      verts.push_back({v[0], v[1]});
    }
    try {
      cfg.invariant_hint = ConvexPolygon(std::move(verts));
    } catch (const Error& e) {
      field_error("invariant_hint", e.what());
    }
    if (!check_invariant_polygon(cfg.system, *cfg.invariant_hint))
      throw Error(Errc::NotInvariant, "field 'invariant_hint': polygon is not mapped into itself by every map");
  }
  if (root.contains("bounds")) {
    const auto b = detail::numbers_at(root["bounds"], "bounds", 4);
    const Box box{b[0], b[1], b[2], b[3]};
    if (!box.valid()) field_error("bounds", "expected [xmin, xmax, ymin, ymax] with max > min");
    cfg.bounds = box;
  }
  return cfg;
}

inline IfsConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Serialises with shortest round-trip number formatting, so parsing the
/// output reproduces every entry bit for bit.
inline std::string write_config(const IfsConfig& cfg) {
  using nlohmann::json;
  const auto& p = cfg.system.probabilities();
  std::string out = "{\n  \"maps\": [\n";
  for (std::size_t i = 0; i < cfg.system.size(); ++i) {
    const AffineMap& f = cfg.system.maps()[i];
    json m;
    m["A"] = json::array({json::array({f.linear.a11, f.linear.a12}), json::array({f.linear.a21, f.linear.a22})});
    m["b"] = json::array({f.offset.x, f.offset.y});
    if (p) m["p"] = (*p)[i];
    out += "    " + m.dump() + (i + 1 < cfg.system.size() ? ",\n" : "\n");
  }
  out += "  ]";
  if (cfg.invariant_hint) {
    json h = json::array();
    for (const auto& v : cfg.invariant_hint->vertices()) h.push_back(json::array({v.x, v.y}));
    out += ",\n  \"invariant_hint\": " + h.dump();
  }
  if (cfg.bounds)
    out += ",\n  \"bounds\": " +
           json::array({cfg.bounds->xmin, cfg.bounds->xmax, cfg.bounds->ymin, cfg.bounds->ymax}).dump();
  return out + "\n}\n";
}

}  // namespace ifs
