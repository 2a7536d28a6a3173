// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return qtopo::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
