#include "mcpgw/protocol/framer.hpp"

#include "mcpgw/error.hpp"
#include "mcpgw/util/text.hpp"

namespace mcpgw::protocol {

void LineFramer::decode_line(std::string_view line, std::vector<FrameEvent>& out) const {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (util::trim(line).empty()) return;
  try {
    out.emplace_back(parse(line));
  } catch (const Error& e) {
    out.emplace_back(ParseErrorEvent{std::string(line), e.what()});
  }
}

std::vector<FrameEvent> LineFramer::feed(std::string_view bytes) {
  std::vector<FrameEvent> events;
  std::size_t start = 0;
  while (true) {
    const auto nl = bytes.find('\n', start);
    if (nl == std::string_view::npos) {
      buffer_.append(bytes.substr(start));
      break;
    }
    if (buffer_.empty()) {
      decode_line(bytes.substr(start, nl - start), events);
    } else {
      buffer_.append(bytes.substr(start, nl - start));
      decode_line(buffer_, events);
      buffer_.clear();
    }
    start = nl + 1;
  }
  return events;
}

std::vector<FrameEvent> LineFramer::finish() {
  std::vector<FrameEvent> events;
  if (!buffer_.empty()) {
    decode_line(buffer_, events);
    buffer_.clear();
  }
  return events;
}

std::vector<FrameEvent> frame_and_parse(std::string_view bytes) {
  LineFramer framer;
  auto events = framer.feed(bytes);
  auto tail = framer.finish();
  events.insert(events.end(), std::make_move_iterator(tail.begin()),
                std::make_move_iterator(tail.end()));
  return events;
}

}  // namespace mcpgw::protocol
