#include "cli.hpp"

int main(int argc, char** argv) { return meancurve::cli::run(argc, argv); }
