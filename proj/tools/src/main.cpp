// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "slicegraph/cli.hpp"

int main(int argc, char** argv) {
    return slicegraph::cli::main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
