#pragma once

#include <iosfwd>

namespace sepbound::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kHypothesis = 2,
    kVerifyFailed = 3,
    kBudget = 4,
};

// Entry point shared by the executable and the tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace sepbound::cli
