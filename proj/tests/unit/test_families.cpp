#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ndetect/errors.hpp"
#include "ndetect/families.hpp"

using namespace ndetect;

namespace {

constexpr double kPi = std::numbers::pi;
const double kThetas[] = {0.0, kPi / 3, kPi / 2, 1.0};

double idem(const ComplexMatrix& k) { return (k * k - k).norm(); }

ComplexVector cav(Cavity c, Complex a) {
    ComplexVector v = ComplexVector::Zero(4);
    v(static_cast<int>(c)) = a;
    return v;
}

} // namespace

TEST_CASE("dim-4 symmetric family at q = 1/4, theta = 0") {
    const ComplexMatrix k = dim4_sym_matrix(0.25, 0.0);
    CHECK(k(0, 0) == Complex(0.75));
    CHECK(k(1, 1) == Complex(0.75));
    CHECK(std::abs(k(0, 3) - 0.25) < 1e-15);
}

TEST_CASE("dim-4 symmetric family sweep") {
    for (int i = 1; i <= 9; ++i) {
        const double q = 0.05 * i;
        for (double theta : kThetas) {
            const ProblemInstance inst = family_dim4_sym(q, theta);
            CHECK(idem(*inst.K) < 1e-12);
            CHECK(projector_rank(*inst.K) == 2);
            const CheckReport r = check_problem(inst);
            CHECK(r.verdict);
            for (int c = 2; c <= 4; ++c) CHECK(r.c(c).residual < 1e-10);
            CHECK(classify_correlation(inst).kind == Correlation::Direct);
        }
    }
    CHECK_THROWS_AS(family_dim4_sym(0.5, 0.0), ParameterRange);
    CHECK_THROWS_AS(family_dim4_sym(0.0, 0.0), ParameterRange);
}

TEST_CASE("dim-6 family sweep") {
    for (int i = 1; i <= 9; ++i) {
        const double p = 0.05 * i;
        for (double theta : kThetas) {
            const ProblemInstance inst = family_dim6(p, theta);
            CHECK(idem(*inst.K) < 1e-12);
            CHECK(projector_rank(*inst.K) == 3);
            const CheckReport r = check_problem(inst);
            CHECK(r.verdict);
            CHECK(r.c(5).residual > 0.1);
            CHECK(classify_correlation(inst).kind == Correlation::Uncorrelated);
        }
    }
    CHECK_THROWS_AS(family_dim6(0.6, 0.0), ParameterRange);
}

TEST_CASE("mu = 0 pattern: printed constants fail, the derived completion works") {
    for (Complex lambda : {Complex(1.0), Complex(2.0), Complex(0.5, -0.7)}) {
        const double l2 = std::norm(lambda);
        for (double p = 0.05; p < 1.0; p += 0.05) {
            for (double theta : {0.0, 1.0}) {
                const Complex u_printed = std::polar(std::sqrt((p - p * p) / (1 + l2)), theta);
                const double q_printed = 1.0 / (1 + l2);
                CHECK(idem(mu0_pattern(lambda, p, q_printed, u_printed)) > 1e-3);

                // oracle: q = (1 - p) / (1 + |lambda|^2), |u|^2 = p q
                const double q = (1 - p) / (1 + l2);
                const Complex u = std::polar(std::sqrt(p * q), theta);
                const ComplexMatrix k = mu0_pattern(lambda, p, q, u);
                CHECK(idem(k) < 1e-12);
                CHECK(projector_rank(k) == 2);
            }
        }
    }
}

TEST_CASE("mu = 0 numeric completion matches the oracle") {
    for (Complex lambda : {Complex(1.0), Complex(0.0, 2.0)}) {
        for (double p : {0.2, 0.5, 0.8}) {
            const double theta = 0.4;
            const Mu0Completion c = solve_mu0_completion(lambda, p, theta);
            const double q = (1 - p) / (1 + std::norm(lambda));
            CHECK(std::abs(c.q - q) < 1e-8);
            CHECK(std::abs(c.u - std::polar(std::sqrt(p * q), theta)) < 1e-8);
            const ProblemInstance inst = family_dim4_mu0(lambda, p, theta);
            CHECK(check_problem(inst).verdict);
            CHECK(projector_rank(*inst.K) == 2);
            CHECK(idem(*inst.K) < 1e-10);
        }
    }
    CHECK_THROWS_AS(family_dim4_mu0(0.0, 0.5, 0.0), ParameterRange);
    CHECK_THROWS_AS(family_dim4_mu0(1.0, 1.0, 0.0), ParameterRange);
}

TEST_CASE("general dim-4 ansatz") {
    SUBCASE("lambda = mu = 1 lands on the symmetric family") {
        const ProblemInstance inst = family_dim4_general(1.0, 1.0, 3);
        const ComplexMatrix& k = *inst.K;
        const double q = k(2, 2).real();
        const double theta = std::arg(k(0, 3));
        REQUIRE(q > 0.0);
        REQUIRE(q < 0.5);
        CHECK((k - dim4_sym_matrix(q, theta)).norm() < 1e-8);
    }
    SUBCASE("complex parameters") {
        for (auto [lambda, mu] : {std::pair<Complex, Complex>{2.0, 1.0}, {Complex(1, 1), Complex(0.5, -0.3)},
                                  {Complex(0, 1), 3.0}}) {
            const ProblemInstance inst = family_dim4_general(lambda, mu, 7);
            CHECK(check_problem(inst).verdict);
            CHECK(projector_rank(*inst.K) == 2);
            const ConstraintSubspace ansatz = dim4_general_ansatz(lambda, mu);
            CHECK(ansatz.membership_residual(*inst.K) < 1e-10);
        }
    }
    CHECK_THROWS_AS(dim4_general_ansatz(0.0, 1.0), ParameterRange);
}

TEST_CASE("mirror transform maps case b to case c") {
    const ProblemInstance b = family_dim4_general(Complex(1.5, 0.5), 2.0, 1);
    const ProblemInstance c = mirror_instance(b);
    CHECK(check_problem(c).verdict);
    CHECK(classify_case(b.psi).label == 'b');
    CHECK(classify_case(c.psi).label == 'c');
    const ProblemInstance back = mirror_instance(c);
    CHECK((back.psi.vector() - b.psi.vector()).norm() < 1e-15);
    CHECK((*back.K - *b.K).norm() < 1e-15);
}

TEST_CASE("embedding keeps solutions") {
    for (int m = 4; m <= 12; m += 4) {
        const ProblemInstance inst = embed_instance(family_dim6(0.3, 0.7), m, 100 + m);
        CHECK(inst.layout.dim1() == 2 * m);
        CHECK(std::abs(inst.psi.norm() - 1.0) < 1e-12);
        CHECK(inst.psi.gc3_residual() < 1e-12);
        CHECK(check_problem(inst).verdict);
    }
    CHECK_THROWS_AS(embed_instance(family_dim6(0.3, 0.7), 2, 0), ParameterRange);
}

TEST_CASE("erasure instance") {
    const EraserInstance e = eraser_instance();
    const ComplexVector psi = e.psi.vector();
    CHECK((e.T * psi - e.E * psi).norm() < 1e-14);
    CHECK(commutator(e.T, e.Tplus).norm() > 0.1);
    CHECK(commutator(e.E, e.Eplus).norm() > 0.1);
    CHECK(std::abs(psi.dot(e.Tplus * psi).real() - 0.5) < 1e-14);
}

TEST_CASE("four-cavity apparatus") {
    const ApparatusInstance s = apparatus_instance();
    const ProblemInstance& inst = s.instance;
    CHECK(check_problem(inst).verdict);
    const ComplexVector psi = inst.psi.vector();
    const double expected[] = {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3};
    const auto ops = lift_operators(inst.layout, inst.decomp, inst.K);
    for (Cavity c : kCavities) {
        const ComplexMatrix P = tensor_product(identity(6), inst.decomp.projector(c));
        CHECK(std::abs(psi.dot(P * psi).real() - expected[static_cast<int>(c)]) < 1e-12);
        const auto& inf = s.inference[static_cast<int>(c)];
        const ComplexMatrix slit = inf.slit == 1 ? ops.E : ops.Ep;
        const ComplexMatrix g = inf.has_g ? *ops.G : *ops.Gp;
        CHECK(std::abs(conditional_probability(slit, P, psi) - 1.0) < 1e-12);
        // G acts on H1 only, so test it on the cavity-projected state
        CHECK((g * P * psi - P * psi).norm() < 1e-12);
    }
}

TEST_CASE("impossibility at dim1 = 2") {
    const Dim2Certificate a = dim2_infeasibility(20, 42);
    CHECK(a.exact_infeasible);
    CHECK(a.kernel_dimension == 0);
    CHECK(a.solutions_found == 0);
    CHECK(a.best_residual > 1e-3);
    const Dim2Certificate b = dim2_infeasibility(5, 9);
    CHECK(b.exact_infeasible == a.exact_infeasible);
    CHECK(b.derivation == a.derivation);

    const SlitLayout l(1);
    const CavityDecomposition d(1, 1, 1, 1);
    const BlockState bad(l, d, {cav(Cavity::C, 1.0)}, {cav(Cavity::D, 1.0)});
    CHECK_THROWS_AS(search_solutions(bad, SolverOptions{}), Gc3Violation);
}

TEST_CASE("case classification") {
    const CaseLabel d17 = classify_case(family_dim6(0.25, 0.0).psi);
    CHECK(d17.label == 'd');
    REQUIRE(d17.mu);
    CHECK(std::abs(*d17.mu - 1.0) < 1e-12);

    const BlockState b = dim4_case_b_state(1.0, 1.0, 2.0, Complex(0, 1));
    const CaseLabel lb = classify_case(b);
    CHECK(lb.label == 'b');
    REQUIRE(lb.lambda);
    CHECK(std::abs(*lb.lambda - Complex(0, 1)) < 1e-12);

    const SlitLayout l3(3);
    const CavityDecomposition d(1, 1, 1, 1);
    // two-dimensional B and D cavities so the pairs can be independent
    const CavityDecomposition wide(1, 2, 1, 2);
    auto w = [](int i) {
        ComplexVector v = ComplexVector::Zero(6);
        v(i) = 1.0;
        return v;
    };
    const BlockState a = assemble_state(l3, wide, {w(1), w(2), ComplexVector::Zero(6)},
                                        {w(4), w(5), ComplexVector::Zero(6)});
    CHECK(classify_case(a).label == 'a');
    // no a or gamma components: the detector image of a solution would vanish
    CHECK(search_solutions(a, SolverOptions{}).rejection.has_value());

    SUBCASE("projective invariance") {
        const BlockState scaled = dim6_pattern_state(Complex(0, 3), 2.0, Complex(-1, 1), 5.0);
        CHECK(classify_case(scaled).label == 'd');
    }
    CHECK_THROWS_AS(classify_case(BlockState(l3, d, {cav(Cavity::A, 1.0), cav(Cavity::A, 0.0), cav(Cavity::A, 0.0)},
                                             {ComplexVector::Zero(4), ComplexVector::Zero(4), ComplexVector::Zero(4)})),
                    DegenerateState);
}
