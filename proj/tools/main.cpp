#include "cli_app.hpp"

int main(int argc, char** argv) { return ncemb::cli::run(argc, argv); }
