#include <iostream>

#include "paircorr_cli/cli.hpp"

int main(int argc, char** argv) {
    return paircorr::cli::run(argc, argv, std::cout, std::cerr);
}
