// Deterministic MCP server driven by a behavior file.
//
//   mcpgw-mock-server <behavior.json>

#include <iostream>

#include "mcpgw/fixtures/mock_behavior.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mcpgw-mock-server <behavior.json>\n";
    return 2;
  }
  return mcpgw::fixtures::run_mock_server(argv[1]);
}
