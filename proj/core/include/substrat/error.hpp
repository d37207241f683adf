#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace substrat {

/// Domain failures raised by the library. The CLI reports `name(kind)` and
/// exits with status 2 when one of these escapes a subcommand.
enum class ErrorKind {
  InvalidInput,
  NotAntisymmetric,
  SecondLayerDegenerate,
  UnsupportedDimensions,
  NearPole,
  BranchRegionViolated,
  InvalidTime,
  GridTooCoarse,
  SeriesDiverges,
  NonGenericDirection,
  BadAnchorVector,
  FiltrationNotTerminating,
  SearchFailed,
  NewtonDiverged,
  DegenerateHessian,
  NonpositiveValue,
  NonGenericMu,
  DegreeInconsistent,
};

std::string_view name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return name(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace substrat
