#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphi {

enum class ErrorCode {
  DuplicateId,
  DanglingEdge,
  CycleDetected,
  SelfLoop,
  SchemaError,
  MissingDuration,
  MissingLevels,
  ShapeMismatch,
  UnknownOp,
  ArityMismatch,
  InsufficientCores,
  InvalidCore,
  Unsupported,
  InvalidArgument,
  TooLarge,
  InconsistentTraces,
  ExecutorPanic,
  EnginePoisoned,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MissingDuration: return "MissingDuration";
    case ErrorCode::MissingLevels: return "MissingLevels";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InsufficientCores: return "InsufficientCores";
    case ErrorCode::InvalidCore: return "InvalidCore";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InconsistentTraces: return "InconsistentTraces";
    case ErrorCode::ExecutorPanic: return "ExecutorPanic";
    case ErrorCode::EnginePoisoned: return "EnginePoisoned";
    case ErrorCode::Io: return "Io";
  }
  return "UnknownError";
}

/// Exception carrying a typed error code. `ids` holds the node ids involved
/// when that is meaningful (the cycle for CycleDetected, the failing op for
/// ExecutorPanic, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<std::int64_t> ids = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        ids_(std::move(ids)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::int64_t>& ids() const noexcept { return ids_; }

 private:
  ErrorCode code_;
  std::vector<std::int64_t> ids_;
};

[[noreturn]] inline void raise(ErrorCode code, std::string message,
                               std::vector<std::int64_t> ids = {}) {
  throw Error(code, std::move(message), std::move(ids));
}

}  // namespace graphi
