#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ndetect/linalg.hpp"
#include "ndetect/screen.hpp"

namespace ndetect::cli {

enum ExitCode : int { kOk = 0, kDomainFailure = 1, kInputError = 2 };

struct FamilyParams {
    double q = 0.25;
    double p = 0.25;
    double theta = 0.0;
    Complex lambda{1.0};
    Complex mu{1.0};
};

/// One parsed invocation. Defaults: seed 0, DFT screen with singleton
/// bins, tolerances from NDETECT_TOL when set.
struct RunConfig {
    std::string command;
    std::string input;  ///< instance path (verify, search, simulate, sample)
    std::string family; ///< family name (family, simulate, sample)
    std::string out;
    Tolerances tol;
    std::uint64_t seed = 0;
    ScreenKind screen = ScreenKind::Dft;
    int bins = 0;
    bool strict = false;
    FamilyParams params;
    int dim1 = 0;
    int trials = 1000;
    int restarts = 32;
    std::optional<int> rank;
    bool require_solution = false;
    std::string select = "identity";
    std::uint64_t n = 1000000;
    int workers = 1;
};

/// Executes `config`. Summaries go to `out`, diagnostics to `err`; artifacts
/// are written only to config.out.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and runs it.
int main(int argc, char** argv);

} // namespace ndetect::cli
