#include "tadic/cli.hpp"

int main(int argc, char** argv) { return tadic::cli::run_main(argc, argv); }
