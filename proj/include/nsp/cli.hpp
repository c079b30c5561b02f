#pragma once

// Command-line front end: generate | oracle | analyze | evaluate | splitcheck.

#include <iosfwd>
#include <string>
#include <vector>

namespace nsp {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitBadArguments = 2,
    kExitUnsatisfiable = 3,
    kExitNoOracle = 4,
    kExitShapeMismatch = 5,
    kExitSplitViolations = 6,
};

// args excludes the program name. NSP_SEED supplies the default seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsp
