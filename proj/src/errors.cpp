#include "shapepose/errors.hpp"

namespace shapepose {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::DegenerateStats: return "DegenerateStats";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::ZeroScale: return "ZeroScale";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::MalformedLayout: return "MalformedLayout";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::NonPositiveDiameter: return "NonPositiveDiameter";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::EmptyAmodal: return "EmptyAmodal";
    case ErrorKind::MaskInconsistency: return "MaskInconsistency";
    case ErrorKind::MissingCameraPose: return "MissingCameraPose";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::UnitMismatch: return "UnitMismatch";
    case ErrorKind::UnsupportedMeshFormat: return "UnsupportedMeshFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace shapepose
