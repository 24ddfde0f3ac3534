#include "ccap/cli.hpp"

int main(int argc, char** argv) { return ccap::dispatch(argc, argv); }
