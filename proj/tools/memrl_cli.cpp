#include "memrl/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return memrl::app::run(argc, argv, std::cout, std::cerr); }
