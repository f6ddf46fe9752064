#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hilasso::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,       // I/O and other runtime failures
    kInvalidInput = 2,  // bad flags, schema or validation errors, dimension mismatch
    kNotConverged = 3,  // solve stopped at max_outer_iter
};

/// Runs the `hilasso` command line. `args` excludes the program name.
///
///   gen        --spec FILE --out DIR [--seed N] [--trial T]
///   solve      --model M --dict FILE --signals FILE --out FILE
///              [--lambda1 X] [--lambda2 X] [--tol X] [--max-iter N] [--max-inner-iter N] [--admm-c X]
///   eval       --dict FILE --truth FILE --report FILE [--tau X]
///   experiment --spec FILE --out FILE [--summary FILE] [--threads N]
///   coherence  --dict FILE --k1 N --k2 N [--cross-k N]
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hilasso::cli
