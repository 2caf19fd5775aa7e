#include "melink/cli.hpp"

int main(int argc, char** argv) { return melink::run_cli(argc, argv); }
