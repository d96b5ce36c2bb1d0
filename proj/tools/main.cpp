#include "hicode/cli.hpp"

int main(int argc, char** argv) {
    return hicode::cli_main(argc, argv);
}
