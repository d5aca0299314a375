#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcpgw/protocol/rpc_message.hpp"

namespace mcpgw::protocol {

/// A line that could not be decoded. `line` is the raw text, verbatim.
struct ParseErrorEvent {
  std::string line;
  std::string reason;

  bool operator==(const ParseErrorEvent&) const = default;
};

using FrameEvent = std::variant<RpcMessage, ParseErrorEvent>;

/// Incremental newline-delimited decoder. Bytes may arrive in arbitrary
/// chunks; each complete line yields exactly one event, in order. Blank lines
/// are separators and yield nothing. A trailing `\r` is stripped.
class LineFramer {
 public:
  std::vector<FrameEvent> feed(std::string_view bytes);

  /// Flushes a final unterminated line, if any.
  std::vector<FrameEvent> finish();

  bool has_partial() const noexcept { return !buffer_.empty(); }

 private:
  void decode_line(std::string_view line, std::vector<FrameEvent>& out) const;

  std::string buffer_;
};

/// Decodes a complete byte stream.
std::vector<FrameEvent> frame_and_parse(std::string_view bytes);

}  // namespace mcpgw::protocol
