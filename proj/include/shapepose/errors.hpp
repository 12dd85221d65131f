#pragma once

#include <stdexcept>
#include <string>

namespace shapepose {

enum class ErrorKind {
  DegenerateInput,
  LayoutMismatch,
  DegenerateStats,
  DimensionMismatch,
  TooFewPoints,
  ZeroScale,
  EmptyMask,
  OutOfBounds,
  MalformedLayout,
  ShapeMismatch,
  NonFiniteState,
  DegenerateMesh,
  EmptyCloud,
  NonPositiveDiameter,
  DegenerateGeometry,
  EmptyAmodal,
  MaskInconsistency,
  MissingCameraPose,
  MissingFile,
  MalformedRecord,
  UnitMismatch,
  UnsupportedMeshFormat,
  IoError,
  InvalidConfig,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on the category instead of the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace shapepose
