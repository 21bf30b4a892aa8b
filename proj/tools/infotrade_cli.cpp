#include "infotrade/cli.hpp"

int main(int argc, char** argv) { return infotrade::cli::run(argc, argv); }
