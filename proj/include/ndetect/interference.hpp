#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ndetect/checker.hpp"
#include "ndetect/families.hpp"
#include "ndetect/screen.hpp"

namespace ndetect {

using Distribution = std::vector<double>;

/// psi split by the which-slit property: psi1 = E psi, psi2 = E' psi.
struct SplitState {
    ComplexVector psi1, psi2;
    double pi1 = 0.0, pi2 = 0.0;
};

SplitState split_state(const ComplexVector& psi, const ComplexMatrix& E);

/// F(Delta) = J(Delta) (x) 1 on the full space.
ComplexMatrix screen_projector(const ScreenModel& screen, int bin, int dim2);

/// <psi | F(Delta) psi> per bin.
Distribution screen_distribution(const BlockState& psi, const ScreenModel& screen);

/// <psi1|F psi1> + <psi2|F psi2> per bin. Throws DegenerateState unless
/// 0 < pi(1) < 1.
Distribution classical_distribution(const BlockState& psi, const ComplexMatrix& E, const ScreenModel& screen);

/// 2 Re <psi1 | Z F(Delta) psi2> per bin (Z = identity when absent). Throws
/// NonCommuting if Z fails to commute with some F(Delta) within `tol`.
Distribution interference_term(const BlockState& psi, const ComplexMatrix& E, const ScreenModel& screen,
                               const std::optional<ComplexMatrix>& Z = std::nullopt, double tol = 1e-10);

/// p(F(Delta) | E) and p(F(Delta) | E') from the normalized split states.
std::pair<Distribution, Distribution> conditional_screen(const BlockState& psi, const ComplexMatrix& E,
                                                         const ScreenModel& screen);

/// Joint probability <psi | Z F(Delta) psi> of hitting Delta with detector
/// outcome 1. Sums to <psi | Z psi>.
Distribution selected_distribution(const BlockState& psi, const ComplexMatrix& Z, const ScreenModel& screen,
                                   double tol = 1e-10);

/// P(cavity, Delta) = <psi | (1 (x) Pi_cavity) F(Delta) psi>.
struct JointTable {
    std::array<Distribution, 4> p; ///< indexed by Cavity, then bin

    int n_bins() const { return static_cast<int>(p[0].size()); }
    std::array<double, 4> cavity_marginal() const;
    Distribution screen_marginal() const;
};

JointTable joint_outcome_distribution(const ProblemInstance& instance, const ScreenModel& screen);

struct Draw {
    Cavity cavity;
    int bin;
    Inference label;
};

struct SampleResult {
    std::uint64_t n = 0;
    std::array<std::vector<std::uint64_t>, 4> counts; ///< cavity x bin
    std::array<std::uint64_t, 4> label_counts{};      ///< (slit1,G), (slit1,G'), (slit2,G), (slit2,G')
    std::vector<Draw> draws;                          ///< filled only when requested

    std::array<double, 4> cavity_frequencies() const;
};

/// Draws per block; each block has its own generator so results do not
/// depend on the number of workers.
inline constexpr std::uint64_t kSampleBlock = 1u << 16;

/**
 * Born-rule Monte Carlo over the joint (cavity, bin) table.
 *
 * Inverse-CDF sampling on the flattened table with a 64-bit Mersenne
 * Twister per block of kSampleBlock draws, seeded from (seed, block index).
 * Each draw is labeled through `inference`.
 */
SampleResult sample_runs(const JointTable& table, const std::array<Inference, 4>& inference, std::uint64_t n,
                         std::uint64_t seed, int workers = 1, bool keep_draws = false);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool impossible_cell_hit = false; ///< a zero-probability cell received counts
};

/// Pearson chi-square of sampled counts against the exact table, over
/// cells with positive probability.
ChiSquare chi_square(const SampleResult& sample, const JointTable& table);

} // namespace ndetect
