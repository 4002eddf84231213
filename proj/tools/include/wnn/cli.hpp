#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "wnn/network.hpp"

namespace wnn::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kPreconditionError = 2,
    kVerificationFailure = 3,
};

/// Entry point of the `wnn` tool. Writes results to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// f = T2 o relu o T1 with T1(x) = (-x + 1, -x - 1), T2(u) = 1 - u1 - u2.
WnNetwork motivating_network();

/// (t T2) o relu o (T1 / t): same norm product as f, output shifted by t - 1.
WnNetwork motivating_rescaled(double t);

struct MotivatingRow {
    double x;
    double f;
    double f_prime;
    double diff;
};

/// f and its rescaled variant (t = 100) on an evenly spaced grid over [-2, 2].
std::vector<MotivatingRow> motivating_table(std::size_t points = 201);

/// `k=A..B[,step]`, inclusive on both ends.
struct SweepRange {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t step = 1;
};
SweepRange parse_sweep(const std::string& text);

}  // namespace wnn::cli
