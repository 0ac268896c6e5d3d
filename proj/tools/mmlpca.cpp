#include <iostream>
#include <string>
#include <vector>

#include "mmlpca/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return mmlpca::run_cli(args, std::cout, std::cerr);
}
