#include "qimem/cli.hpp"

int main(int argc, char** argv) { return qimem::cli::run(argc, argv); }
