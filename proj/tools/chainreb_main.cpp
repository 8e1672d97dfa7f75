#include "chainreb/cli_lib.hpp"

#include <cstdio>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    chainreb::cli::RunResult result = chainreb::cli::run_command(args);
    std::fputs(result.report.c_str(), stdout);
    return result.exit_code;
}
