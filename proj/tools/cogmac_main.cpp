#include <vector>

#include "cogmac/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cogmac::run_cli(args);
}
