#include "mcpgw/catalog/fleet.hpp"

#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "mcpgw/error.hpp"
#include "mcpgw/util/files.hpp"

namespace mcpgw::catalog {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw Error(Errc::ConfigError, fmt::format("{}: {}", field, why));
}

std::string expand(const std::string& text, const Substitutions& vars, const std::string& field) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 2, "${") == 0) {
      const auto close = text.find('}', i + 2);
      if (close == std::string::npos) config_error(field, "unterminated '${'");
      const std::string name = text.substr(i + 2, close - i - 2);
      if (auto it = vars.find(name); it != vars.end()) {
        out += it->second;
      } else if (const char* env = std::getenv(name.c_str())) {
        out += env;
      } else {
        config_error(field, fmt::format("unknown placeholder '${{{}}}'", name));
      }
      i = close + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::string required_string(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(path + "." + key, "required");
  if (!it->is_string()) config_error(path + "." + key, "must be a string");
  auto value = it->get<std::string>();
  if (value.empty()) config_error(path + "." + key, "must not be empty");
  return value;
}

}  // namespace

std::vector<ServerConfig> parse_fleet(const json& doc, const Substitutions& vars) {
  if (!doc.is_object()) config_error("<root>", "fleet must be an object");
  if (auto v = doc.find("format_version"); v == doc.end() || !v->is_number_integer() ||
                                           v->get<int>() != kFleetFormatVersion) {
    config_error("format_version", fmt::format("must be {}", kFleetFormatVersion));
  }
  const auto servers = doc.find("servers");
  if (servers == doc.end() || !servers->is_array()) config_error("servers", "must be an array");

  std::vector<ServerConfig> fleet;
  std::set<std::string> names;
  for (std::size_t i = 0; i < servers->size(); ++i) {
    const json& s = (*servers)[i];
    const std::string path = fmt::format("servers[{}]", i);
    if (!s.is_object()) config_error(path, "must be an object");

    ServerConfig cfg;
    cfg.server_name = required_string(s, "server_name", path);
    if (!names.insert(cfg.server_name).second) {
      config_error(path + ".server_name", fmt::format("duplicate server_name '{}'", cfg.server_name));
    }
    cfg.command = expand(required_string(s, "command", path), vars, path + ".command");

    if (auto args = s.find("args"); args != s.end()) {
      if (!args->is_array()) config_error(path + ".args", "must be an array of strings");
      for (std::size_t j = 0; j < args->size(); ++j) {
        const std::string at = fmt::format("{}.args[{}]", path, j);
        if (!(*args)[j].is_string()) config_error(at, "must be a string");
        cfg.args.push_back(expand((*args)[j].get<std::string>(), vars, at));
      }
    }
    if (auto env = s.find("env"); env != s.end()) {
      if (!env->is_object()) config_error(path + ".env", "must be an object of strings");
      for (const auto& [k, v] : env->items()) {
        if (!v.is_string()) config_error(path + ".env." + k, "must be a string");
        cfg.env.emplace(k, expand(v.get<std::string>(), vars, path + ".env." + k));
      }
    }
    if (auto cat = s.find("category"); cat != s.end() && !cat->is_null()) {
      if (!cat->is_string()) config_error(path + ".category", "must be a string");
      const auto label = cat->get<std::string>();
      cfg.category = parse_server_category(label);
      if (!cfg.category) {
        config_error(path + ".category",
                     fmt::format("unknown category label '{}' (expected one of Discovery, "
                                 "Visualization, File Access, Code, Entertainment, Finance, "
                                 "Location, Miscellaneous)",
                                 label));
      }
    }
    if (auto d = s.find("description"); d != s.end()) {
      if (!d->is_string()) config_error(path + ".description", "must be a string");
      cfg.description = d->get<std::string>();
    }
    fleet.push_back(std::move(cfg));
  }
  return fleet;
}

std::filesystem::path executable_dir() {
  std::error_code ec;
  auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) return std::filesystem::current_path();
  return exe.parent_path();
}

std::vector<ServerConfig> load_fleet(const std::filesystem::path& path) {
  const json doc = util::read_json_file(path, Errc::ConfigError);
  Substitutions vars{
      {"config_dir", std::filesystem::absolute(path).parent_path().lexically_normal().string()},
      {"exe_dir", executable_dir().string()},
  };
  try {
    return parse_fleet(doc, vars);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace mcpgw::catalog
