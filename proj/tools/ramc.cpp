#include "ramc/cli.hpp"

int main(int argc, char** argv) { return ramc::cli::run(argc, argv); }
