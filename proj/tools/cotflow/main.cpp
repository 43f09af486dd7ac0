// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "cotflow/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return cotflow::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr, std::cin);
}
