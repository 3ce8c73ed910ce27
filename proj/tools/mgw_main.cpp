#include "mgw/run_config.hpp"

int main(int argc, char** argv) { return mgw::cli::run(argc, argv); }
