#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "treerank/game.hpp"

namespace treerank {

/// Default bounds for a named profile: desk (12/96/8), quick (6/40/6),
/// wide (16/128/10). Throws UsageError for other names.
GameBounds profile_bounds(const std::string& name);

/// Runs one command line (without the program name). Reports go to `out`
/// (or --output), diagnostics to `err`. The interactive game reads `in`.
/// Returns 0 on success, 1 when a property suite or check fails, 2 on
/// usage and fixture errors.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace treerank
