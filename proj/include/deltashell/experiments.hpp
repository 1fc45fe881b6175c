#pragma once

#include <string>

#include "deltashell/config.hpp"

namespace dsh {

/// Execute the configured experiment, writing outputs atomically under
/// out_dir. Returns the process exit code: 0 success, 1 config error,
/// 2 numerical failure. Progress lines go to stderr.
int run_experiment(const RunConfig& cfg, const std::string& out_dir);

}  // namespace dsh
