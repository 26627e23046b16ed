// SPDX-License-Identifier: MIT
#include <iostream>

#include "bernstein/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    const auto verdict = bernstein::cli::run(args, std::cout, std::cerr);
    return bernstein::cli::exit_code(verdict.status);
}
