#include <iostream>

#include "embedgauge/pipeline.hpp"

int main(int argc, char** argv) { return embedgauge::pipeline::run_cli(argc, argv, std::cout, std::cerr); }
