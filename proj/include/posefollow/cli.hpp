// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace posefollow::cli {

enum ExitCode : int
{
  kOk           = 0,
  kUsageError   = 1,
  kDataError    = 2,
  kRuntimeError = 3,
};

/// Runs one subcommand. `args` excludes the program name. Results go to `out`,
/// diagnostics (prefixed "error[<code>]:") to `err`.
int run( const std::vector<std::string> & args, std::ostream & out, std::ostream & err );

}  // namespace posefollow::cli
