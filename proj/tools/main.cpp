#include "netrstq/cli.hpp"

int main(int argc, char** argv) { return netrstq::run_cli(argc, argv); }
