#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ndetect/layout.hpp"
#include "ndetect/screen.hpp"

namespace ndetect {

/// Candidate solution: WS property from `layout`, detectors from `decomp`,
/// incompatible property K (absent for which-slit-only instances).
struct ProblemInstance {
    SlitLayout layout;
    CavityDecomposition decomp;
    std::optional<ComplexMatrix> K;
    BlockState psi;
    std::string family;                   ///< provenance tag, empty if unknown
    std::map<std::string, double> params; ///< family parameters, for the record
};

struct ConditionResult {
    bool pass = false;
    double residual = 0.0;
};

struct CheckReport {
    std::array<ConditionResult, 5> conditions; ///< C.1 .. C.5
    ProjectorReport k_projector;
    bool verdict = false;

    const ConditionResult& c(int i) const { return conditions.at(i - 1); }
};

/**
 * Checks conditions C1-C5 for explicit operators.
 *
 * C.1 residual is ||[L, K]||_F and passes above tol.nonzero. C.2 is
 * ||[S, R]||_F, C.3 is ||T psi - E psi|| and C.4 is ||Y psi - G psi||; these
 * pass at or below tol.equality. C.5 is the smallest of ||E psi||,
 * ||psi - E psi||, ||G psi||, ||psi - G psi|| and passes above tol.nonzero.
 * The verdict additionally requires K to be a projector.
 */
CheckReport check_conditions(const ComplexMatrix& L, const ComplexMatrix& K, const ComplexMatrix& S,
                             const ComplexMatrix& R, const ComplexVector& psi,
                             const Tolerances& tol = {});

/// check_conditions with S = A + B and R = A + C from the instance's decomposition.
CheckReport check_problem(const ProblemInstance& instance, const Tolerances& tol = {});

/// <psi|X C psi> / <psi|C psi> for commuting projectors X, C.
/// Throws NonCommuting if ||[X, C]||_F > tol and ZeroDenominator if
/// <psi|C psi> <= tol.
double conditional_probability(const ComplexMatrix& X, const ComplexMatrix& C,
                               const ComplexVector& psi, double tol = 1e-10);

enum class Correlation { Direct, TImpliesY, YImpliesT, Uncorrelated, Degenerate };

std::string_view correlation_name(Correlation c);

struct CorrelationClass {
    Correlation kind = Correlation::Degenerate;
    std::optional<double> p_t_given_y; ///< absent when <psi|Y psi> vanishes
    std::optional<double> p_y_given_t; ///< absent when <psi|T psi> vanishes
};

/// Classifies how the slit detector T and the detector Y sort particles.
/// A state that is (numerically) an eigenvector of T or Y is Degenerate.
CorrelationClass classify_correlation(const ProblemInstance& instance, const Tolerances& tol = {});

struct NondisturbingReport {
    bool ok = false;
    double screen_commutator = 0.0; ///< max over bins of ||[Y, F(Delta)]||_F
    double yg_commutator = 0.0;     ///< ||[Y, G]||_F
    double image_residual = 0.0;    ///< ||Y psi - G psi||
};

NondisturbingReport verify_nondisturbing(const ComplexMatrix& Y, const ComplexMatrix& G,
                                         const ScreenModel& screen, const ComplexVector& psi,
                                         double tol = 1e-10);

} // namespace ndetect
