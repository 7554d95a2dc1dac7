#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ndetect/errors.hpp"
#include "ndetect/families.hpp"
#include "ndetect/solver.hpp"

using namespace ndetect;

namespace {

const BlockState& dim6_state() {
    static const BlockState s = family_dim6(0.25, 0.0).psi;
    return s;
}

} // namespace

TEST_CASE("constraint subspace of the dim-6 state contains the closed-form family") {
    const ConstraintSubspace sub = build_constraint_subspace(dim6_state());
    CHECK(sub.constraint_residual < 1e-12);
    CHECK(sub.dimension() > 0);
    for (double p : {0.05, 0.2, 0.45}) {
        for (double theta : {0.0, 1.0, 2.5}) {
            CHECK(sub.membership_residual(dim6_matrix(p, theta)) < 1e-12);
        }
    }
    // an arbitrary Hermitian matrix is far from it
    CHECK(sub.membership_residual(identity(6)) > 1e-3);
}

TEST_CASE("basis is orthonormal under the real trace inner product") {
    const ConstraintSubspace sub = build_constraint_subspace(dim6_state());
    for (int i = 0; i < sub.dimension(); ++i) {
        CHECK((sub.basis[i] - sub.basis[i].adjoint()).norm() < 1e-12);
        for (int j = 0; j < sub.dimension(); ++j) {
            const double ip = (sub.basis[i].adjoint() * sub.basis[j]).trace().real();
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("gradient agrees with central differences") {
    const ConstraintSubspace sub = build_constraint_subspace(dim6_state());
    std::vector<double> x(sub.dimension());
    for (int i = 0; i < sub.dimension(); ++i) x[i] = 0.3 * std::sin(1.7 * i + 0.2);
    for (std::optional<int> target : {std::optional<int>{}, std::optional<int>{3}}) {
        const auto g = idempotence_gradient(sub, x, target);
        const double h = 1e-6;
        for (int i = 0; i < sub.dimension(); ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fp = std::pow(idempotence_objective(sub, xp, target), 2);
            const double fm = std::pow(idempotence_objective(sub, xm, target), 2);
            const double fd = (fp - fm) / (2 * h);
            CHECK(std::abs(g[i] - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("make_subspace orthonormalizes and drops dependent directions") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    b(1, 1) = 1.0;
    const ConstraintSubspace sub = make_subspace(identity(2), {a, 2.0 * a, a + b});
    CHECK(sub.dimension() == 2);
    CHECK(sub.offset.norm() < 1e-15); // the identity lies in the span
}

TEST_CASE("restart seeds are distinct and stable") {
    CHECK(restart_seed(1, 0) == restart_seed(1, 0));
    CHECK(restart_seed(1, 0) != restart_seed(1, 1));
    CHECK(restart_seed(1, 0) != restart_seed(2, 0));
}

TEST_CASE("search is deterministic and independent of the thread count") {
    const ConstraintSubspace sub = build_constraint_subspace(dim6_state());
    SolverOptions o;
    o.restarts = 12;
    o.rank_target = 3;
    o.seed = 5;
    const ProjectorSearch a = find_projector(sub, o);
    o.threads = 4;
    const ProjectorSearch b = find_projector(sub, o);
    REQUIRE(a.solutions.size() == b.solutions.size());
    for (std::size_t i = 0; i < a.solutions.size(); ++i) CHECK((a.solutions[i] - b.solutions[i]).norm() == 0.0);
    REQUIRE(a.restarts.size() == b.restarts.size());
    for (std::size_t i = 0; i < a.restarts.size(); ++i) {
        CHECK(a.restarts[i].best_residuals == b.restarts[i].best_residuals);
    }
}

TEST_CASE("found projectors lie in the subspace and pass the checker") {
    SolverOptions o;
    o.restarts = 40;
    o.rank_target = 3;
    o.seed = 1;
    const SearchReport rep = search_solutions(dim6_state(), o);
    CHECK_FALSE(rep.rejection.has_value());
    REQUIRE_FALSE(rep.instances.empty());
    const ConstraintSubspace sub = build_constraint_subspace(dim6_state());
    for (const auto& inst : rep.instances) {
        CHECK(sub.membership_residual(*inst.K) < 1e-9);
        CHECK(projector_rank(*inst.K) == 3);
        CHECK(check_problem(inst).verdict);
    }
}

TEST_CASE("no Hermitian K for a generic state at dim1 = 2") {
    const BlockState psi = random_dim2_state(17);
    CHECK_THROWS_AS(build_constraint_subspace(psi), EmptySubspace);
    const SearchReport rep = search_solutions(psi, SolverOptions{});
    CHECK(rep.instances.empty());
    CHECK(rep.subspace_dimension == -1);
    CHECK(rep.best_residual > 1e-3);
}

TEST_CASE("degenerate and incompatible states") {
    const SlitLayout l(1);
    const CavityDecomposition d(1, 1, 1, 1);
    ComplexVector x(4), y(4);
    x << 1, 0, 0, 0;
    y << 0, 0, 0, 0;
    const SearchReport rep = search_solutions(assemble_state(l, d, {x}, {y}), SolverOptions{});
    CHECK(rep.rejection.has_value());
    CHECK(rep.instances.empty());

    x << 0, 0, 1, 0;
    y << 0, 0, 0, 1;
    CHECK_THROWS_AS(build_constraint_subspace(assemble_state(l, d, {x}, {y})), Gc3Violation);
}

TEST_CASE("options validation") {
    SolverOptions o;
    o.restarts = 0;
    CHECK_THROWS_AS(o.validate(), ParameterRange);
    o = SolverOptions{};
    o.tolerance = 1e-3;
    CHECK_THROWS_AS(o.validate(), ParameterRange);
}
