#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ndetect/checker.hpp"
#include "ndetect/solver.hpp"

namespace ndetect {

// ---------------------------------------------------------------------------
// Closed-form matrices

/// Rank-2 projector on C^4 solving the symmetric dim-4 problem, q in (0, 1/2):
/// diagonal blocks [[1-q, q], [q, 1-q]] and [[q, -q], [-q, q]], off-diagonal
/// entries +-e^{i theta} sqrt((1/2 - q) q).
ComplexMatrix dim4_sym_matrix(double q, double theta);

/// Rank-3 projector on C^6 for the dim-6 family, p in (0, 1/2).
ComplexMatrix dim6_matrix(double p, double theta);

/// The mu = 0 pattern on C^4 with free entries p, q, u:
/// K = 1 (+) [[p, -lambda u, u], [-conj(lambda u), |lambda|^2 q, -conj(lambda) q],
///            [conj(u), -lambda q, q]].
/// Hermitian for every real p, q; idempotent only for particular (q, u).
ComplexMatrix mu0_pattern(Complex lambda, double p, double q, Complex u);

// ---------------------------------------------------------------------------
// States

/// Case (b) state on m = 2: x_1 = a1 |A>, x_2 = mu a1 |A>, y_1 = delta1 |D>,
/// y_2 = lambda delta1 |D>, one-dimensional cavities. Normalized.
BlockState dim4_case_b_state(Complex a1, Complex delta1, Complex mu, Complex lambda);

/// m = 3 state with a_1 = a_2 = 0, a_3 != 0, b_2 = mu b_1, b_3 = 0 and
/// gamma_1 = gamma_2 = 0, gamma_3 != 0, delta_2 = lambda delta_1, delta_3 = 0.
BlockState dim6_pattern_state(Complex b1, Complex a3, Complex delta1, Complex gamma3, Complex mu = 1.0,
                              Complex lambda = 1.0);

// ---------------------------------------------------------------------------
// Families

struct Dim4Amplitudes {
    Complex a1{0.5};
    Complex delta1{0.5};
};

struct Dim6Amplitudes {
    Complex b1, a3, delta1, gamma3;
    Dim6Amplitudes();
};

/// m = 2, mu = lambda = 1. Throws ParameterRange unless 0 < q < 1/2.
ProblemInstance family_dim4_sym(double q, double theta, const Dim4Amplitudes& amps = {});

struct Mu0Completion {
    double q = 0.0;
    Complex u;
    double idempotent_residual = 0.0;
};

/// Solves for the (q, u) that make mu0_pattern(lambda, p, q, u) a rank-2
/// projector with arg(u) = theta, by descent on the idempotence residual.
/// Throws SolverFailure with the best residual when no completion is found.
Mu0Completion solve_mu0_completion(Complex lambda, double p, double theta, std::uint64_t seed = 1);

/// m = 2 with mu = 0: state a1 |e_1 A> + delta1 (|r_1 D> + lambda |r_2 D>),
/// a1 = delta1 by default. Requires lambda != 0 and 0 < p < 1.
ProblemInstance family_dim4_mu0(Complex lambda, double p, double theta);

/// Hermitian ansatz for the case-(b) state with mu, lambda != 0, as an
/// affine family in (p, q, Re u, Im u).
ConstraintSubspace dim4_general_ansatz(Complex lambda, Complex mu);

/// Searches the ansatz for a rank-2 projector and returns a verified
/// instance. Throws SolverFailure after `restarts` unsuccessful starts.
ProblemInstance family_dim4_general(Complex lambda, Complex mu, std::uint64_t seed = 0, int restarts = 64);

/// Swaps the slit blocks of H1 and relabels cavities A<->C, B<->D. Maps
/// case-(b) solutions to case-(c) solutions.
ProblemInstance mirror_instance(const ProblemInstance& instance);

/// Pads each slit with zero-amplitude basis vectors up to `m` per slit and
/// applies a random slit-block-diagonal unitary W: K -> W K W^dagger,
/// psi -> (W (x) 1) psi. Solutions map to solutions.
ProblemInstance embed_instance(const ProblemInstance& instance, int m, std::uint64_t seed);

/// m = 3 family with rank-3 K; lambda = mu = 1. Throws ParameterRange
/// unless 0 < p < 1/2.
ProblemInstance family_dim6(double p, double theta, const Dim6Amplitudes& amps = {});

// ---------------------------------------------------------------------------
// Named instances

struct EraserInstance {
    SlitLayout layout{1};
    CavityDecomposition decomp{1, 0, 0, 1}; ///< |1> is cavity A, |0> is cavity D
    BlockState psi;
    ComplexMatrix E, T;         ///< which-slit property and its detector
    ComplexMatrix Eplus, Tplus; ///< the erasing pair
    ComplexMatrix Kplus;        ///< |psi_+><psi_+| on H1
    ComplexMatrix Rplus;        ///< |+><+| on H2

    /// Which-slit-only instance (no K).
    ProblemInstance instance() const;
};

EraserInstance eraser_instance();

/// What the photon's cavity says about the particle.
struct Inference {
    int slit;    ///< 1 or 2
    bool has_g;  ///< true: property G, false: G'
};

struct ApparatusInstance {
    ProblemInstance instance;
    std::array<Inference, 4> inference; ///< indexed by Cavity
};

/// The four-cavity apparatus: m = 3, one-dimensional cavities, six equal
/// amplitudes with slit regions u, c, d as basis vectors 1, 2, 3.
ApparatusInstance apparatus_instance();

// ---------------------------------------------------------------------------
// Impossibility at dim(H1) = 2

struct Dim2Certificate {
    bool exact_infeasible = false;
    int kernel_dimension = -1; ///< of the system forced on (a, b, gamma, delta)
    std::vector<std::string> derivation;
    int trials = 0;
    int solutions_found = 0;
    int rejected_degenerate = 0;
    double best_residual = 0.0; ///< smallest constraint-plus-idempotence residual
};

/// Draws a random detector-compatible state at m = 1.
BlockState random_dim2_state(std::uint64_t seed);

Dim2Certificate dim2_infeasibility(int trials, std::uint64_t seed, const SolverOptions& base = {});

// ---------------------------------------------------------------------------
// Case classification

struct CaseLabel {
    char label = '?'; ///< 'a'..'d'
    bool b_dependent = false;
    bool delta_dependent = false;
    std::optional<Complex> mu;     ///< b_2 = mu b_1 (or x_2 = mu x_1 for m = 2)
    std::optional<Complex> lambda; ///< delta_2 = lambda delta_1 (or y_2 = lambda y_1)
};

/// Labels detector-compatible states for m = 2 (by vanishing of the b and
/// delta components) and m = 3 (by linear dependence of (b_1, b_2) and
/// (delta_1, delta_2)). Throws DegenerateState if a whole slit side is zero.
CaseLabel classify_case(const BlockState& psi);

} // namespace ndetect
