#include "semitoric/cli.hpp"

int main(int argc, char** argv) { return semitoric::run(argc, argv); }
