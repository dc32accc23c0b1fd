#include "nitool/cli.hpp"

int main(int argc, char** argv) {
    return nitool::run_cli(argc, argv);
}
