#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ndetect/checker.hpp"
#include "ndetect/layout.hpp"

namespace ndetect {

/**
 * Affine family of Hermitian matrices K = offset + sum_i c_i basis[i].
 *
 * Built from a state, it is the complete set of Hermitian K with
 * (K (x) 1) psi = Y psi. The basis is orthonormal under Re tr(A^dagger B),
 * so coordinates are an isometry onto the subspace.
 */
struct ConstraintSubspace {
    int dim1 = 0;
    ComplexMatrix offset;
    std::vector<ComplexMatrix> basis;
    double constraint_residual = 0.0; ///< least-squares residual of the linear system

    int dimension() const noexcept { return static_cast<int>(basis.size()); }
    ComplexMatrix point(std::span<const double> coords) const;
    /// Coordinates of the orthogonal projection of K onto the subspace.
    std::vector<double> coordinates(const ComplexMatrix& K) const;
    /// Frobenius distance from K to the subspace.
    double membership_residual(const ComplexMatrix& K) const;
};

/// Subspace from an offset and spanning directions (Hermitian, possibly
/// dependent). Orthonormalizes the directions and moves the offset to the
/// point nearest the origin.
ConstraintSubspace make_subspace(const ComplexMatrix& offset, const std::vector<ComplexMatrix>& directions);

/// Throws Gc3Violation for a state outside the detector-compatible form and
/// EmptySubspace when no Hermitian K satisfies the linear constraints.
ConstraintSubspace build_constraint_subspace(const BlockState& psi, double gc3_tol = 1e-10);

struct SolverOptions {
    int restarts = 32;
    int max_iterations = 200;
    double tolerance = 1e-10;       ///< accepted ||K^2 - K||_F
    std::optional<int> rank_target; ///< adds (tr K - target)^2 to the objective
    double dedup_distance = 1e-6;
    std::uint64_t seed = 0;
    double start_scale = 0.5; ///< std. deviation of Gaussian start coordinates
    int threads = 1;

    void validate() const;
};

struct RestartTrace {
    std::uint64_t sub_seed = 0;
    std::vector<double> best_residuals; ///< best combined residual after each iteration
    double idempotent_residual = 0.0;   ///< at the final iterate
    bool converged = false;
};

struct ProjectorSearch {
    std::vector<ComplexMatrix> solutions;
    std::vector<RestartTrace> restarts;
    double best_residual = 0.0; ///< smallest final idempotence residual over restarts
};

/// sqrt(||K^2 - K||_F^2 + w (tr K - target)^2) with w = 1 when a target is set.
double idempotence_objective(const ConstraintSubspace& sub, std::span<const double> coords,
                             std::optional<int> rank_target);
/// Gradient of the squared objective with respect to the coordinates.
std::vector<double> idempotence_gradient(const ConstraintSubspace& sub, std::span<const double> coords,
                                         std::optional<int> rank_target);

/// Sub-seed for one restart; identical regardless of thread count.
std::uint64_t restart_seed(std::uint64_t seed, int restart);

/// Levenberg-Marquardt descent on the idempotence objective from Gaussian
/// starts. Returned matrices are re-verified projectors lying in `sub`.
ProjectorSearch find_projector(const ConstraintSubspace& sub, const SolverOptions& opts);

struct SearchReport {
    SolverOptions options;
    std::optional<std::string> rejection; ///< set when the state was refused before search
    int subspace_dimension = -1;          ///< -1 when no subspace exists
    double constraint_residual = 0.0;
    ProjectorSearch search;
    std::vector<ProblemInstance> instances; ///< candidates that passed check_problem
    double best_residual = 0.0;             ///< constraint plus idempotence residual
};

/// Full pipeline: subspace, projector search, then check_problem on every
/// candidate. A state with a vanishing side of its E or G image can never
/// satisfy C.5 and is rejected with an empty result.
SearchReport search_solutions(const BlockState& psi, const SolverOptions& opts,
                              const Tolerances& tol = {});

} // namespace ndetect
