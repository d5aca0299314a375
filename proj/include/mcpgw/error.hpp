#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcpgw {

/// Every failure the gateway can report. Grouped by the module that raises it.
enum class Errc {
  // protocol
  ParseError,
  SpawnError,
  HandshakeTimeout,
  TransportError,
  ToolNotFound,
  ToolErrorResult,
  StateError,
  // catalog
  ConfigError,
  EmptyCatalog,
  VersionMismatch,
  CorruptFile,
  // retrieval
  QueryFormatError,
  DimensionMismatch,
  InvalidArgument,
  // copilot
  NotFound,
  TransportExhausted,
  BindError,
  // agent / llm
  BackendError,
  // eval
  UnparseableResponse,
  UnparseableVerdict,
  MissingJudgment,
  CoverageMismatch,
};

std::string_view to_string(Errc code) noexcept;

/// Transport failures are retried by the gateway; semantic failures are
/// handed back to the agent as observations.
enum class FailureKind { transport, semantic, other };

FailureKind failure_kind(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  FailureKind kind() const noexcept { return failure_kind(code_); }

 private:
  Errc code_;
};

}  // namespace mcpgw
