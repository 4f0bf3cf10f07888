#include "cardex/cli.hpp"

int main(int argc, char** argv) { return cardex::cli_main(argc, argv); }
