// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "uqc/cli/cli.hpp"

int main(int argc, char** argv) { return uqc::run_cli(argc, argv, std::cout, std::cerr); }
