#include "edslab/cli.hpp"

int main(int argc, char** argv) { return edslab::run(std::vector<std::string>(argv, argv + argc)); }
