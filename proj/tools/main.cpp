#include "fuzzyseek/cli.hpp"

int main(int argc, char** argv) {
    return fuzzyseek::cli_main(argc, argv);
}
