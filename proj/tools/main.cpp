#include "cli.hpp"

int main(int argc, char** argv) { return dalk::cli::run(argc, argv); }
