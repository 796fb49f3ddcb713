#include "sfrf/commands.hpp"

int main(int argc, char** argv) { return sfrf::run_cli(argc, argv); }
