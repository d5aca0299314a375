#pragma once

#include <sys/types.h>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mcpgw::protocol {

/// A spawned child with its stdin and stdout connected to pipes. stderr goes
/// to /dev/null unless `inherit_stderr` is set. The destructor kills and reaps
/// the child.
class ChildProcess {
 public:
  /// Throws Error(SpawnError) when the command cannot be resolved or spawned.
  /// `env` entries are added to (or override) the parent environment.
  ChildProcess(const std::string& command, const std::vector<std::string>& args,
               const std::map<std::string, std::string>& env, bool inherit_stderr = false);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  pid_t pid() const noexcept { return pid_; }

  /// Writes every byte or throws Error(TransportError).
  void write_all(std::string_view bytes);

  /// Blocking read from the child's stdout. Returns 0 on end of stream and
  /// -1 on error.
  ssize_t read_some(char* buffer, std::size_t size);

  void close_stdin() noexcept;

  /// SIGKILL, then reap. Safe to call repeatedly.
  void kill() noexcept;

  /// Waits up to `grace_ms` for a voluntary exit before killing.
  void shutdown(int grace_ms) noexcept;

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  bool reaped_ = false;
};

/// Resolves `command` against PATH (when it has no slash). Returns an empty
/// string when nothing executable is found.
std::string resolve_executable(const std::string& command);

}  // namespace mcpgw::protocol
