#include "reachsynth/cli.hpp"

int main(int argc, char** argv) { return reachsynth::run_cli(argc, argv); }
