// Command line front end: simulation runs, identity checks, and density
// tables driven by a key-value config file.  Subcommands are registered in
// main(); the heavy lifting lives in the core library.
#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "not yet wired\n");
    return 2;
}
