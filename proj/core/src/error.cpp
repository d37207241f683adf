#include "substrat/error.hpp"

namespace substrat {

std::string_view name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::SecondLayerDegenerate: return "SecondLayerDegenerate";
    case ErrorKind::UnsupportedDimensions: return "UnsupportedDimensions";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::BranchRegionViolated: return "BranchRegionViolated";
    case ErrorKind::InvalidTime: return "InvalidTime";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::SeriesDiverges: return "SeriesDiverges";
    case ErrorKind::NonGenericDirection: return "NonGenericDirection";
    case ErrorKind::BadAnchorVector: return "BadAnchorVector";
    case ErrorKind::FiltrationNotTerminating: return "FiltrationNotTerminating";
    case ErrorKind::SearchFailed: return "SearchFailed";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::DegenerateHessian: return "DegenerateHessian";
    case ErrorKind::NonpositiveValue: return "NonpositiveValue";
    case ErrorKind::NonGenericMu: return "NonGenericMu";
    case ErrorKind::DegreeInconsistent: return "DegreeInconsistent";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(name(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace substrat
