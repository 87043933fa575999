#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifs {

enum class Errc {
  InvalidIndex,
  SizeLimit,
  MissingProbabilities,
  NonpositiveProbability,
  InvalidProbability,
  WrongArity,
  EmptyInput,
  DivergedOrbit,
  GridMismatch,
  DegeneratePolygon,
  NotInvariant,
  ParseError,
  AddressParseError,
  InvalidArgument,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidIndex: return "InvalidIndex";
    case Errc::SizeLimit: return "SizeLimit";
    case Errc::MissingProbabilities: return "MissingProbabilities";
    case Errc::NonpositiveProbability: return "NonpositiveProbability";
    case Errc::InvalidProbability: return "InvalidProbability";
    case Errc::WrongArity: return "WrongArity";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DivergedOrbit: return "DivergedOrbit";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::DegeneratePolygon: return "DegeneratePolygon";
    case Errc::NotInvariant: return "NotInvariant";
    case Errc::ParseError: return "ParseError";
    case Errc::AddressParseError: return "AddressParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ifs
