#include "commands.hpp"

int main(int argc, char** argv) { return gfd::cli::run(argc, argv); }
