#include "mcpgw/server_config.hpp"

#include <array>
#include <utility>

namespace mcpgw {

namespace {

constexpr std::array<std::pair<ServerCategory, std::string_view>, 8> kCategoryLabels{{
    {ServerCategory::Discovery, "Discovery"},
    {ServerCategory::Visualization, "Visualization"},
    {ServerCategory::FileAccess, "File Access"},
    {ServerCategory::Code, "Code"},
    {ServerCategory::Entertainment, "Entertainment"},
    {ServerCategory::Finance, "Finance"},
    {ServerCategory::Location, "Location"},
    {ServerCategory::Miscellaneous, "Miscellaneous"},
}};

}  // namespace

std::string_view to_string(ServerCategory c) noexcept {
  for (const auto& [cat, label] : kCategoryLabels) {
    if (cat == c) return label;
  }
  return "Miscellaneous";
}

std::optional<ServerCategory> parse_server_category(std::string_view label) noexcept {
  for (const auto& [cat, name] : kCategoryLabels) {
    if (name == label) return cat;
  }
  return std::nullopt;
}

}  // namespace mcpgw
