#ifndef CKFZ_ERROR_HPP_
#define CKFZ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ckfz {

enum class ErrorKind {
  FrameUndefined,
  NotSimpleRotation,
  ZeroField,
  UnknownIdentity,
  BlowUp,
  NotAdmissible,
  NotClosed,
  NotParallel,
  SupportViolation,
  ConstructionFailed,
  OutOfMemory,
  NoConvergence,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FrameUndefined: return "FrameUndefined";
    case ErrorKind::NotSimpleRotation: return "NotSimpleRotation";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::UnknownIdentity: return "UnknownIdentity";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::NotParallel: return "NotParallel";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::ConstructionFailed: return "ConstructionFailed";
    case ErrorKind::OutOfMemory: return "OutOfMemory";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ckfz

#endif  // CKFZ_ERROR_HPP_
