#include "mcpgw/util/files.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace mcpgw::util {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::ConfigError, fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json read_json_file(const std::filesystem::path& path, Errc code) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_and_column(text, e.byte);
    throw Error(code, fmt::format("{}:{}:{}: malformed JSON ({})", path.string(), line, col,
                                  e.what()));
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::ConfigError, fmt::format("cannot write '{}'", tmp.string()));
    }
    out << contents;
    out.flush();
    if (!out) {
      throw Error(Errc::ConfigError, fmt::format("short write to '{}'", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace mcpgw::util
