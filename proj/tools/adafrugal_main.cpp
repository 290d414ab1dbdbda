#include "adafrugal/cli.hpp"

int main(int argc, char** argv) {
    return adafrugal::cli_main({argv + 1, argv + argc});
}
