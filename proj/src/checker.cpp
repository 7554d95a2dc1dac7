#include "ndetect/checker.hpp"

#include <algorithm>
#include <cmath>

#include "ndetect/errors.hpp"

namespace ndetect {

CheckReport check_conditions(const ComplexMatrix& L, const ComplexMatrix& K, const ComplexMatrix& S,
                             const ComplexMatrix& R, const ComplexVector& psi,
                             const Tolerances& tol) {
    require_square(L, "L");
    require_square(S, "S");
    if (K.rows() != L.rows() || K.cols() != L.cols()) {
        throw DimensionError("K and L differ in dimension");
    }
    if (R.rows() != S.rows() || R.cols() != S.cols()) {
        throw DimensionError("S and R differ in dimension");
    }
    const int dim2 = static_cast<int>(S.rows());
    if (psi.size() != L.rows() * S.rows()) {
        throw DimensionError("state dimension does not match dim1 * dim2");
    }

    CheckReport rep;
    rep.k_projector = is_projector(K, tol);

    const ComplexVector e_psi = apply_h1(L, psi, dim2);
    const ComplexVector t_psi = apply_h2(S, psi, dim2);
    const ComplexVector g_psi = apply_h1(K, psi, dim2);
    const ComplexVector y_psi = apply_h2(R, psi, dim2);

    auto& c = rep.conditions;
    c[0].residual = commutator(L, K).norm();
    c[0].pass = c[0].residual > tol.nonzero;
    c[1].residual = commutator(S, R).norm();
    c[1].pass = c[1].residual <= tol.equality;
    c[2].residual = (t_psi - e_psi).norm();
    c[2].pass = c[2].residual <= tol.equality;
    c[3].residual = (y_psi - g_psi).norm();
    c[3].pass = c[3].residual <= tol.equality;
    c[4].residual = std::min({e_psi.norm(), (psi - e_psi).norm(), g_psi.norm(), (psi - g_psi).norm()});
    c[4].pass = c[4].residual > tol.nonzero;

    rep.verdict = rep.k_projector.is_projector &&
                  std::all_of(c.begin(), c.end(), [](const ConditionResult& r) { return r.pass; });
    return rep;
}

CheckReport check_problem(const ProblemInstance& instance, const Tolerances& tol) {
    if (!instance.K) {
        throw DimensionError("check_problem needs a candidate K");
    }
    if (!(instance.psi.layout() == instance.layout) || !(instance.psi.decomp() == instance.decomp)) {
        throw DimensionError("instance state was built for a different layout or decomposition");
    }
    return check_conditions(instance.layout.L(), *instance.K, instance.decomp.S(), instance.decomp.R(),
                            instance.psi.vector(), tol);
}

double conditional_probability(const ComplexMatrix& X, const ComplexMatrix& C,
                               const ComplexVector& psi, double tol) {
    const double comm = commutator(X, C).norm();
    if (comm > tol) {
        throw NonCommuting("conditional probability requested for non-commuting projectors (||[X,C]|| = " +
                           std::to_string(comm) + ")");
    }
    if (psi.size() != C.rows()) {
        throw DimensionError("state does not match operator dimension");
    }
    const ComplexVector c_psi = C * psi;
    const double den = psi.dot(c_psi).real();
    if (den <= tol) {
        throw ZeroDenominator("conditioning event has probability " + std::to_string(den));
    }
    return psi.dot(X * c_psi).real() / den;
}

std::string_view correlation_name(Correlation c) {
    switch (c) {
    case Correlation::Direct: return "Direct";
    case Correlation::TImpliesY: return "TImpliesY";
    case Correlation::YImpliesT: return "YImpliesT";
    case Correlation::Uncorrelated: return "Uncorrelated";
    case Correlation::Degenerate: return "Degenerate";
    }
    return "?";
}

CorrelationClass classify_correlation(const ProblemInstance& instance, const Tolerances& tol) {
    const int dim2 = instance.decomp.dim2();
    const ComplexVector psi = instance.psi.vector();
    const ComplexMatrix S = instance.decomp.S();
    const ComplexMatrix R = instance.decomp.R();
    const ComplexVector t_psi = apply_h2(S, psi, dim2);
    const ComplexVector y_psi = apply_h2(R, psi, dim2);
    // S and R are diagonal in the same basis, so TY psi = YT psi.
    const ComplexVector ty_psi = apply_h2(S * R, psi, dim2);

    CorrelationClass out;
    const double pt = t_psi.squaredNorm();
    const double py = y_psi.squaredNorm();
    const double pty = ty_psi.squaredNorm();
    if (py > tol.equality) out.p_t_given_y = pty / py;
    if (pt > tol.equality) out.p_y_given_t = pty / pt;

    const double smallest = std::min({t_psi.norm(), (psi - t_psi).norm(), y_psi.norm(), (psi - y_psi).norm()});
    if (smallest <= tol.nonzero) {
        out.kind = Correlation::Degenerate;
        return out;
    }
    const bool t_eq_y = (t_psi - y_psi).norm() <= tol.equality;
    const bool t_eq_ty = (t_psi - ty_psi).norm() <= tol.equality;
    const bool y_eq_ty = (y_psi - ty_psi).norm() <= tol.equality;
    if (t_eq_y) {
        out.kind = Correlation::Direct;
    } else if (t_eq_ty) {
        out.kind = Correlation::TImpliesY;
    } else if (y_eq_ty) {
        out.kind = Correlation::YImpliesT;
    } else {
        out.kind = Correlation::Uncorrelated;
    }
    return out;
}

NondisturbingReport verify_nondisturbing(const ComplexMatrix& Y, const ComplexMatrix& G,
                                         const ScreenModel& screen, const ComplexVector& psi,
                                         double tol) {
    require_square(Y, "Y");
    if (Y.rows() % screen.dim1 != 0) {
        throw DimensionError("detector dimension is not a multiple of the screen dimension");
    }
    const Eigen::Index dim2 = Y.rows() / screen.dim1;
    const ComplexMatrix one2 = identity(dim2);
    NondisturbingReport rep;
    for (const auto& j : screen.J) {
        rep.screen_commutator = std::max(rep.screen_commutator, commutator(Y, tensor_product(j, one2)).norm());
    }
    rep.yg_commutator = commutator(Y, G).norm();
    rep.image_residual = (Y * psi - G * psi).norm();
    rep.ok = rep.screen_commutator <= tol && rep.yg_commutator <= tol && rep.image_residual <= tol;
    return rep;
}

} // namespace ndetect
