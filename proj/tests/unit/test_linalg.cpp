#include <doctest.h>

#include <cmath>
#include <random>

#include "ndetect/errors.hpp"
#include "ndetect/linalg.hpp"

using namespace ndetect;

namespace {

ComplexMatrix random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

} // namespace

TEST_CASE("tensor product matches the index formula") {
    std::mt19937_64 rng(3);
    const ComplexMatrix a = random_matrix(2, 3, rng), b = random_matrix(4, 2, rng);
    const ComplexMatrix k = tensor_product(a, b);
    REQUIRE(k.rows() == 8);
    REQUIRE(k.cols() == 6);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 3; ++j1)
            for (int i2 = 0; i2 < 4; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    CHECK(std::abs(k(i1 * 4 + i2, j1 * 2 + j2) - a(i1, j1) * b(i2, j2)) < 1e-15);
}

TEST_CASE("mixed-product identity") {
    std::mt19937_64 rng(11);
    const ComplexMatrix a = random_matrix(3, 3, rng), b = random_matrix(2, 2, rng);
    const ComplexMatrix c = random_matrix(3, 3, rng), d = random_matrix(2, 2, rng);
    const ComplexMatrix lhs = tensor_product(a, b) * tensor_product(c, d);
    const ComplexMatrix rhs = tensor_product(a * c, b * d);
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("tensor product refuses oversize results") {
    CHECK_THROWS_AS(tensor_product(identity(100), identity(100)), DimensionError);
}

TEST_CASE("commutator of Pauli X and Z") {
    ComplexMatrix x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    ComplexMatrix expected(2, 2);
    expected << 0, -2, 2, 0;
    CHECK((commutator(x, z) - expected).norm() < 1e-15);
    CHECK(commutator(x, x).norm() == 0.0);
}

TEST_CASE("is_projector residuals") {
    SUBCASE("half identity is not idempotent") {
        const auto r = is_projector(0.5 * identity(2), Tolerances{});
        CHECK_FALSE(r.is_projector);
        CHECK(r.hermitian_residual == doctest::Approx(0.0));
        // ||0.25 I - 0.5 I||_F = 0.25 sqrt(2)
        CHECK(r.idempotent_residual == doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("rank-one ket-bra") {
        ComplexVector v(3);
        v << Complex(1, 2), 0.5, Complex(0, -1);
        const auto p = ket_bra(v);
        const auto r = is_projector(p, Tolerances{});
        CHECK(r.is_projector);
        CHECK(projector_rank(p) == 1);
    }
    SUBCASE("non-Hermitian idempotent") {
        ComplexMatrix m(2, 2);
        m << 1, 1, 0, 0;
        const auto r = is_projector(m, Tolerances{});
        CHECK(r.idempotent_residual < 1e-15);
        CHECK(r.hermitian_residual == doctest::Approx(std::sqrt(2.0)));
        CHECK_FALSE(r.is_projector);
    }
}

TEST_CASE("projector_rank") {
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(0, 0) = p(2, 2) = 1.0;
    CHECK(projector_rank(p) == 2);
    CHECK_THROWS_AS(projector_rank(0.5 * identity(2)), NotAProjector);
}

TEST_CASE("non-finite input is rejected") {
    ComplexMatrix m = identity(2);
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(require_finite(m, "m"), Error);
    CHECK_THROWS_AS(require_square(ComplexMatrix::Zero(2, 3), "m"), DimensionError);
}
