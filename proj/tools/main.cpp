#include "asuq/cli_app.hpp"

int main(int argc, char** argv) { return asuq::run_cli(argc, argv); }
