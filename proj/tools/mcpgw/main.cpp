#include "mcpgw/cli/commands.hpp"

int main(int argc, char** argv) { return mcpgw::cli::main(argc, argv); }
