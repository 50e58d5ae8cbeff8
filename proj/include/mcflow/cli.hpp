#pragma once

// The mcflow command line: simulate, verify and report subcommands.

#include <iosfwd>
#include <string>
#include <vector>

namespace mcf::cli {

enum ExitCode : int {
    kOk = 0,
    kViolations = 1,
    kBlowup = 2,
    kDegenerate = 3,
    kUsage = 64,
    kDataError = 65,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

std::string version();

}  // namespace mcf::cli
