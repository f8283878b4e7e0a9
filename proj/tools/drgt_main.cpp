#include "drgt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return drgt::cli::cli_main(std::move(args), std::cout, std::cerr);
}
