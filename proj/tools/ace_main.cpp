#include "ace/cli.hpp"

int main(int argc, char** argv) {
    return ace::cli::run(argc, argv);
}
