#include <doctest.h>

#include "ndetect/errors.hpp"
#include "ndetect/layout.hpp"

using namespace ndetect;

namespace {

ComplexVector cav(Cavity c, Complex a) {
    ComplexVector v = ComplexVector::Zero(4);
    v(static_cast<int>(c)) = a;
    return v;
}

} // namespace

TEST_CASE("slit projector") {
    const SlitLayout l(3);
    CHECK(l.dim1() == 6);
    const ComplexMatrix L = l.L();
    CHECK((L * L - L).norm() == 0.0);
    CHECK(L.trace().real() == doctest::Approx(3.0));
    CHECK(L(0, 0) == Complex(1.0));
    CHECK(L(3, 3) == Complex(0.0));
    CHECK_THROWS(SlitLayout(0));
}

TEST_CASE("cavity decomposition") {
    const CavityDecomposition d(1, 2, 0, 1);
    CHECK(d.dim2() == 4);
    CHECK(d.offset(Cavity::B) == 1);
    CHECK(d.offset(Cavity::D) == 3);
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    for (Cavity c : kCavities) sum += d.projector(c);
    CHECK((sum - identity(4)).norm() == 0.0);
    CHECK((d.S() - d.projector(Cavity::A) - d.projector(Cavity::B)).norm() == 0.0);
    CHECK((d.R() - d.projector(Cavity::A) - d.projector(Cavity::C)).norm() == 0.0);
    CHECK(commutator(d.S(), d.R()).norm() == 0.0);
    CHECK_THROWS(CavityDecomposition(0, 0, 0, 0));
    CHECK_THROWS(CavityDecomposition(-1, 1, 1, 1));
}

TEST_CASE("block state flattening follows the Kronecker order") {
    const SlitLayout l(2);
    const CavityDecomposition d(1, 1, 1, 1);
    BlockState s(l, d, {cav(Cavity::A, 1.0), cav(Cavity::B, 2.0)}, {cav(Cavity::C, 3.0), cav(Cavity::D, 4.0)});
    const ComplexVector v = s.vector();
    REQUIRE(v.size() == 16);
    CHECK(v(0 * 4 + 0) == Complex(1.0));
    CHECK(v(1 * 4 + 1) == Complex(2.0));
    CHECK(v(2 * 4 + 2) == Complex(3.0));
    CHECK(v(3 * 4 + 3) == Complex(4.0));
    const BlockState back = BlockState::from_vector(l, d, v);
    CHECK((back.vector() - v).norm() == 0.0);
    CHECK(s.gc3_residual() == 0.0);
}

TEST_CASE("gc.3 enforcement") {
    const SlitLayout l(1);
    const CavityDecomposition d(1, 1, 1, 1);
    CHECK_THROWS_AS(assemble_state(l, d, {cav(Cavity::C, 1.0)}, {cav(Cavity::D, 1.0)}, true), Gc3Violation);
    const BlockState ok = assemble_state(l, d, {cav(Cavity::A, 3.0)}, {cav(Cavity::D, 4.0)}, true);
    CHECK(ok.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        assemble_state(l, d, {ComplexVector::Zero(4)}, {ComplexVector::Zero(4)}), DimensionError);
}

TEST_CASE("lifted operators act on the right factors") {
    const SlitLayout l(1);
    const CavityDecomposition d(1, 1, 1, 1);
    const BlockState s = assemble_state(l, d, {cav(Cavity::A, 1.0) + cav(Cavity::B, 1.0)},
                                        {cav(Cavity::C, 1.0) + cav(Cavity::D, 1.0)});
    const auto ops = lift_operators(l, d);
    const ComplexVector v = s.vector();
    CHECK((ops.E + ops.Ep - identity(8)).norm() == 0.0);
    CHECK((ops.T * v - ops.E * v).norm() < 1e-15);
    CHECK((apply_h1(l.L(), v, 4) - ops.E * v).norm() < 1e-15);
    CHECK((apply_h2(d.R(), v, 4) - ops.Y * v).norm() < 1e-15);
    CHECK_FALSE(ops.G.has_value());
}

TEST_CASE("expected images") {
    const SlitLayout l(1);
    const CavityDecomposition d(1, 1, 1, 1);
    const BlockState s = assemble_state(l, d, {cav(Cavity::A, 1.0) + cav(Cavity::B, 2.0)},
                                        {cav(Cavity::C, 3.0) + cav(Cavity::D, 4.0)});
    const auto img = expected_images(s);
    const auto ops = lift_operators(l, d);
    CHECK((img.e_image - ops.E * s.vector()).norm() < 1e-15);
    CHECK((img.g_image - ops.Y * s.vector()).norm() < 1e-15);
}
