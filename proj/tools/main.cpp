#include "commands.hpp"

int main(int argc, char** argv) { return strokefit::cli::run(argc, argv); }
