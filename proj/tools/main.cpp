#include "toposcope/cli.hpp"

int main(int argc, char** argv) { return toposcope::run_cli(argc, argv); }
