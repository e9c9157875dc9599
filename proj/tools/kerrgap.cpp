#include "kerrgap/cli.hpp"

int main(int argc, char** argv) { return kerrgap::cli::run(argc, argv); }
