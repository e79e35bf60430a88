// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slicegraph::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 1,
    kBackend = 2,
    kInvariant = 3,
};

// Parses argv-style arguments (args[0] is the program name) and runs the subcommand.
// Machine-readable output (written paths, summaries) goes to out, messages to err.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slicegraph::cli
