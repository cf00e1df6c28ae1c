#include "mvsenti/commands.hpp"

int main(int argc, char** argv) { return mvsenti::run_cli(argc, argv); }
