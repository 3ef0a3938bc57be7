// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Flat key=value configuration file:
//
//   # incremental run on the toy benchmark
//   strategy = sst-a
//   runs = 5
//   tune-lr = 3e-5     # trailing comments are fine
//
// Keys are the long command-line flag names without the dashes. Whitespace
// around keys and values is trimmed, blank lines are skipped, and a key may
// appear only once. Flags given on the command line override file values.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sst {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Entries in file order. Throws ParseError.
ConfigEntries parse_config(std::string_view text);
ConfigEntries load_config(const std::string& path);
std::string format_config(const ConfigEntries& entries);

}  // namespace sst
