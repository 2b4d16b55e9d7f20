#include "fermitherm/experiments.hpp"

int main(int argc, char** argv) { return fermitherm::cli::run_cli(argc, argv); }
