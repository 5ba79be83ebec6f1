#include "cli.hpp"

int main(int argc, char** argv) { return caustica::cli::run(argc, argv); }
