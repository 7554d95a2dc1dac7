#include <doctest.h>

#include <cmath>

#include "ndetect/errors.hpp"
#include "ndetect/screen.hpp"

using namespace ndetect;

TEST_CASE("dft cross terms at dim1 = 4 alternate in sign") {
    const ScreenModel s = build_screen(4);
    REQUIRE(s.n_bins() == 4);
    for (int k = 0; k < 4; ++k) {
        const double expected = (k % 2 == 0 ? 0.25 : -0.25);
        CHECK(std::abs(s.J[k](0, 2).real() - expected) < 1e-15);
    }
}

TEST_CASE("screen projectors resolve the identity") {
    for (int dim1 : {2, 4, 8, 12, 24}) {
        for (int bins : {0, 2}) {
            const ScreenModel s = build_screen_unchecked(dim1, ScreenKind::Dft, bins);
            CHECK((s.propagator.adjoint() * s.propagator - identity(dim1)).norm() < 1e-12);
            ComplexMatrix sum = ComplexMatrix::Zero(dim1, dim1);
            for (int a = 0; a < s.n_bins(); ++a) {
                sum += s.J[a];
                CHECK(is_projector(s.J[a], 1e-12).is_projector);
                for (int b = a + 1; b < s.n_bins(); ++b) CHECK((s.J[a] * s.J[b]).norm() < 1e-12);
            }
            CHECK((sum - identity(dim1)).norm() < 1e-13);
        }
    }
}

TEST_CASE("contiguous even-width bins cancel the e1-r1 cross term") {
    // <e_1|J r_1> sums (-1)^k / dim1 over the bin
    CHECK(max_cross_term(build_screen_unchecked(8, ScreenKind::Dft, 4)) < 1e-15);
    CHECK_THROWS_AS(build_screen(8, ScreenKind::Dft, 4), DegenerateScreen);
    CHECK(std::abs(max_cross_term(build_screen(6, ScreenKind::Dft, 2)) - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("identity propagator is rejected") {
    CHECK_THROWS_AS(build_screen(4, ScreenKind::Identity), DegenerateScreen);
    const ScreenModel s = build_screen_unchecked(4, ScreenKind::Identity, 0);
    CHECK(max_cross_term(s) == 0.0);
}

TEST_CASE("bin counts must divide dim1") {
    CHECK_THROWS_AS(build_screen(6, ScreenKind::Dft, 4), DimensionError);
    CHECK_THROWS_AS(build_screen(5), DimensionError);
    CHECK_THROWS_AS(parse_screen_kind("gauss"), ParameterRange);
    CHECK(parse_screen_kind("dft") == ScreenKind::Dft);
}
