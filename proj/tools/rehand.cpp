#include <iostream>

#include "rehand/cli.hpp"

int main(int argc, char** argv) {
    return rehand::cli::run_cli(argc, argv, std::cout, std::cerr);
}
