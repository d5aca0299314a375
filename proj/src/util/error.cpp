#include "mcpgw/error.hpp"

namespace mcpgw {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::SpawnError: return "SpawnError";
    case Errc::HandshakeTimeout: return "HandshakeTimeout";
    case Errc::TransportError: return "TransportError";
    case Errc::ToolNotFound: return "ToolNotFound";
    case Errc::ToolErrorResult: return "ToolErrorResult";
    case Errc::StateError: return "StateError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::EmptyCatalog: return "EmptyCatalog";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::QueryFormatError: return "QueryFormatError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotFound: return "NotFound";
    case Errc::TransportExhausted: return "TransportExhausted";
    case Errc::BindError: return "BindError";
    case Errc::BackendError: return "BackendError";
    case Errc::UnparseableResponse: return "UnparseableResponse";
    case Errc::UnparseableVerdict: return "UnparseableVerdict";
    case Errc::MissingJudgment: return "MissingJudgment";
    case Errc::CoverageMismatch: return "CoverageMismatch";
  }
  return "Unknown";
}

FailureKind failure_kind(Errc code) noexcept {
  switch (code) {
    case Errc::SpawnError:
    case Errc::HandshakeTimeout:
    case Errc::TransportError:
    case Errc::StateError:
      return FailureKind::transport;
    case Errc::ToolErrorResult:
    case Errc::ToolNotFound:
    case Errc::NotFound:
      return FailureKind::semantic;
    default:
      return FailureKind::other;
  }
}

}  // namespace mcpgw
