#include "enaqt/cli/run.hpp"

int main(int argc, char** argv) { return enaqt::cli::main(argc, argv); }
