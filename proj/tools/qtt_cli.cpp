#include "qtt/cli.hpp"

int main(int argc, char** argv) { return qtt::run_cli(argc, argv); }
