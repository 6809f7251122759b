#include "volterra/cli.hpp"

int main(int argc, char** argv) {
    return volterra::cli::run(argc, argv);
}
