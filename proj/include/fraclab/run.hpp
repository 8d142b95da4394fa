#pragma once

#include <string>
#include <vector>

namespace fraclab {

/// CLI entry point. Exit codes: 0 pass, 1 experiment fail-verdict,
/// 2 usage or configuration error, 3 numerical error.
int run_command(const std::vector<std::string>& args);

} // namespace fraclab
