// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage error, 3 data or
// other runtime error, 4 training divergence. Failures print one line
//
//   error: <Kind>: <message>
//
// on the error stream (followed by the usage text for usage errors).

#include <iosfwd>
#include <string>
#include <vector>

namespace sst {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitDivergence = 4;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sst
