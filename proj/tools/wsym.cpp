#include <wsym/cli.hpp>

int main(int argc, char** argv) { return wsym::cli::run(argc, argv, std::cout, std::cerr); }
