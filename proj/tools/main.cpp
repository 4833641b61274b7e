#include "illumkit/cli.hpp"

int main(int argc, char** argv) { return illumkit::run_cli(argc, argv); }
