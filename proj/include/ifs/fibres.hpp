#pragma once

// Fibres pi(i1 i2 ...) = intersection over n of f_{i1} o ... o f_{in}(C),
// approximated at finite depth by the exact affine image of a convex
// invariant polygon C.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ifs/affine.hpp"
#include "ifs/error.hpp"
#include "ifs/polygon.hpp"
#include "ifs/system.hpp"

namespace ifs {

inline constexpr double kInvarianceTolerance = 1e-9;

/// True iff every vertex image f_i(v) lies in C (within 1e-9); by convexity
/// this gives f_i(C) inside C.
inline bool check_invariant_polygon(const IfsSystem& s, const ConvexPolygon& c) {
  for (const auto& f : s.maps())
    for (const auto& v : c.vertices())
      if (!c.contains(f(v), kInvarianceTolerance)) return false;
  return true;
}

/// Symbol sequence: a finite prefix followed by an optional tail repeated
/// forever, e.g. prefix (1) with tail (2) is 1 2 2 2 ...
struct Address {
  Word prefix;
  std::optional<Word> tail;

  bool infinite() const noexcept { return tail.has_value(); }

  /// First n letters; shorter (the whole prefix) when there is no tail.
  Word unrolled(std::size_t n) const {
    std::vector<unsigned> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n && i < prefix.size(); ++i) out.push_back(prefix[i]);
    if (tail)
      while (out.size() < n) out.push_back((*tail)[(out.size() - prefix.size()) % tail->size()]);
    return Word(std::move(out));
  }

  std::string str() const {
    auto digits = [](const Word& w) {
      std::string s;
      for (unsigned l : w.letters) s += static_cast<char>('0' + l);
      return s;
    };
    return tail ? digits(prefix) + ":" + digits(*tail) : digits(prefix);
  }

  void validate(std::size_t map_count) const {
    auto check = [&](const Word& w) {
      for (unsigned l : w.letters)
        if (l < 1 || l > map_count)
          throw Error(Errc::InvalidIndex, "address letter " + std::to_string(l) + " outside 1.." +
                                              std::to_string(map_count));
    };
    check(prefix);
    if (tail) check(*tail);
  }

  static Address constant(unsigned letter) { return {Word{letter}, Word{letter}}; }
  static Address periodic(const Word& w) { return {w, w}; }
};

/// Parses "prefix" or "prefix:tail" with letters 1..9, e.g. "1:1", "1222", ":2".
inline Address parse_address(std::string_view text) {
  auto letters = [&](std::string_view part) {
    std::vector<unsigned> out;
    for (char ch : part) {
      if (ch < '1' || ch > '9')
        throw Error(Errc::AddressParseError, "invalid letter '" + std::string(1, ch) + "' in address \"" +
                                                 std::string(text) + "\" (expected digits 1-9)");
      out.push_back(static_cast<unsigned>(ch - '0'));
    }
    return Word(std::move(out));
  };
  const auto colon = text.find(':');
  Address a;
  if (colon == std::string_view::npos) {
    a.prefix = letters(text);
    if (a.prefix.empty()) throw Error(Errc::AddressParseError, "empty address");
    return a;
  }
  if (text.find(':', colon + 1) != std::string_view::npos)
    throw Error(Errc::AddressParseError, "more than one ':' in address \"" + std::string(text) + "\"");
  a.prefix = letters(text.substr(0, colon));
  a.tail = letters(text.substr(colon + 1));
  if (a.tail->empty()) throw Error(Errc::AddressParseError, "empty periodic tail in \"" + std::string(text) + "\"");
  return a;
}

struct FibreApprox {
  std::size_t depth = 0;
  ConvexPolygon polygon;  ///< f_{i1} o ... o f_{i_depth}(C)
  double area = 0.0;
  double diameter = 0.0;
  double det_product = 1.0;  ///< |det| of the composed linear part
};

struct FibreSequence {
  Address address;
  std::vector<FibreApprox> steps;
  bool truncated = false;  ///< finite address shorter than the requested depth
};

/// Nested images of C along the address, depths 1..n.
inline FibreSequence fibre_sequence(const IfsSystem& s, const ConvexPolygon& c, const Address& a, std::size_t n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "fibre depth must be >= 1");
  if (!check_invariant_polygon(s, c))
    throw Error(Errc::NotInvariant, "polygon is not mapped into itself by every map");
  a.validate(s.size());
  const Word letters = a.unrolled(n);
  if (letters.empty()) throw Error(Errc::InvalidArgument, "address has no letters");
  FibreSequence out{a, {}, letters.size() < n};
  out.steps.reserve(letters.size());
  AffineMap composed = AffineMap::identity();
  for (std::size_t k = 0; k < letters.size(); ++k) {
    composed = k == 0 ? s.map(letters[0]) : compose(composed, s.map(letters[k]));
    ConvexPolygon poly = c.image(composed);
    const double area = poly.area();
    const double diam = poly.diameter();
    out.steps.push_back({k + 1, std::move(poly), area, diam, std::abs(determinant(composed.linear))});
  }
  return out;
}

struct FibreClass {
  enum class Kind { Point, Segment, Undecided };
  Kind kind = Kind::Undecided;
  Vec2 point;             ///< Point: vertex mean of the final polygon
  Vec2 from, to;          ///< Segment endpoints, lexicographically ordered

  static constexpr std::string_view name(Kind k) noexcept {
    switch (k) {
      case Kind::Point: return "point";
      case Kind::Segment: return "segment";
      case Kind::Undecided: return "undecided";
    }
    return "undecided";
  }
};

struct ClassifyTolerances {
  double point = 1e-5;
  double collinearity = 1e-9;
};

/// Reads off the shape of the deepest polygon. Undecided means "deepen".
inline FibreClass classify_fibre(const FibreSequence& seq, ClassifyTolerances tol = {}) {
  FibreClass out;
  if (seq.steps.empty()) return out;
  const auto& last = seq.steps.back();
  if (!(last.area < tol.collinearity)) return out;
  if (last.diameter < tol.point) {
    out.kind = FibreClass::Kind::Point;
    out.point = last.polygon.vertex_mean();
    return out;
  }
  if (last.area < tol.collinearity * last.diameter * last.diameter) {
    auto [pair, d] = last.polygon.farthest_pair();
    auto [a, b] = pair;
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
    out.kind = FibreClass::Kind::Segment;
    out.from = a;
    out.to = b;
  }
  return out;
}

struct ClassifiedFibre {
  FibreSequence sequence;
  FibreClass cls;
};

struct DeepeningOptions {
  std::size_t depth = 40;
  std::size_t max_depth = 80;
  std::size_t step = 10;
  ClassifyTolerances tol;
};

/// Classifies at `depth`, deepening by `step` while undecided.
inline ClassifiedFibre classify_address(const IfsSystem& s, const ConvexPolygon& c, const Address& a,
                                        const DeepeningOptions& opt = {}) {
  std::size_t depth = opt.depth;
  for (;;) {
    FibreSequence seq = fibre_sequence(s, c, a, depth);
    FibreClass cls = classify_fibre(seq, opt.tol);
    if (cls.kind != FibreClass::Kind::Undecided || depth + opt.step > opt.max_depth || seq.truncated)
      return {std::move(seq), cls};
    depth += opt.step;
  }
}

struct StronglyFibredReport {
  enum class Verdict { StronglyFibred, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::optional<ContractiveWord> witness_word;
  std::optional<Address> witness_address;  ///< periodic address w w w ...
  std::optional<Vec2> singleton;           ///< fixed point of f_w: the singleton fibre
  bool point_fibred_falsified = false;
  std::optional<Address> segment_witness;
  std::vector<ClassifiedFibre> constant_fibres;  ///< one per letter, i i i ...
};

/// A contractive word w gives a singleton fibre at
/// its periodic address, which makes the invariant set strongly-fibred. A
/// constant address whose fibre is a segment shows it is not point-fibred.
inline StronglyFibredReport strongly_fibred_report(const IfsSystem& s, const ConvexPolygon& c, unsigned max_word_len,
                                                   const DeepeningOptions& opt = {}) {
  if (!check_invariant_polygon(s, c))
    throw Error(Errc::NotInvariant, "polygon is not mapped into itself by every map");
  StronglyFibredReport r;
  if (auto cw = find_contractive_word(s, max_word_len)) {
    r.verdict = StronglyFibredReport::Verdict::StronglyFibred;
    r.witness_address = Address::periodic(cw->word);
    r.singleton = fixed_point(compose_word(s, cw->word));
    r.witness_word = std::move(cw);
  }
  for (unsigned i = 1; i <= s.size(); ++i) {
    auto fibre = classify_address(s, c, Address::constant(i), opt);
    if (fibre.cls.kind == FibreClass::Kind::Segment && !r.point_fibred_falsified) {
      r.point_fibred_falsified = true;
      r.segment_witness = fibre.sequence.address;
    }
    r.constant_fibres.push_back(std::move(fibre));
  }
  return r;
}

}  // namespace ifs
