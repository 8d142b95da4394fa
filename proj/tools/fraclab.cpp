#include <string>
#include <vector>

#include "fraclab/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fraclab::run_command(args);
}
