#pragma once

#include "run_config.hpp"

#include <filesystem>
#include <iosfwd>

namespace holmes::cli {

/// Each command writes its files under `out` and a `config.txt` echo.
/// Return value is the process exit code.
int cmd_nodes(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_basis(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_converge(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Parses argv, dispatches, and maps exceptions to exit codes
/// (0 success, 1 numerical failure, 2 usage or configuration error).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace holmes::cli
