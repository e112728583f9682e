#pragma once

#include <stdexcept>
#include <string>

namespace glclt {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedManifold,
  GridMismatch,
  ScalingMismatch,
  NonConvergence,
  ZeroInnerProduct,
  NonSimpleIndex,
  ZeroVariance,
  NonTangentDirection,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedManifold: return "UnsupportedManifold";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ScalingMismatch: return "ScalingMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ZeroInnerProduct: return "ZeroInnerProduct";
    case ErrorCode::NonSimpleIndex: return "NonSimpleIndex";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonTangentDirection: return "NonTangentDirection";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace glclt
