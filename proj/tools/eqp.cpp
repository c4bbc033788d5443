#include "eqp/cli.hpp"

int main(int argc, char** argv) { return eqp::cli::run(argc, argv); }
