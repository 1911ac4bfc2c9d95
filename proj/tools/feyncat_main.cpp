#include <iostream>
#include <string>
#include <vector>

#include "feyncat/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    feyncat::CmdResult r = feyncat::run_cli(args);
    std::cout << r.out;
    return r.code;
}
