#include "subsam/cli.hpp"

int main(int argc, char** argv) { return subsam::run_cli(argc, argv); }
