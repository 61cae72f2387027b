#include "rlmpc/cli.hpp"

int main(int argc, char** argv) { return rlmpc::cli::run_main(argc, argv); }
