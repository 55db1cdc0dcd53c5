#pragma once

#include <string>
#include <vector>

namespace cogmac {

/// Batch front-end. Exit codes: 0 success, 1 validation/usage error,
/// 2 numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace cogmac
