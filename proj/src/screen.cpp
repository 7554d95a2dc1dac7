#include "ndetect/screen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ndetect/errors.hpp"

namespace ndetect {

ScreenKind parse_screen_kind(std::string_view name) {
    if (name == "dft") return ScreenKind::Dft;
    if (name == "identity") return ScreenKind::Identity;
    throw ParameterRange("unknown screen kind '" + std::string(name) + "'");
}

std::string_view screen_kind_name(ScreenKind kind) {
    return kind == ScreenKind::Dft ? "dft" : "identity";
}

ScreenModel build_screen_unchecked(int dim1, ScreenKind kind, int n_bins) {
    if (dim1 < 2 || dim1 % 2 != 0) {
        throw DimensionError("screen dimension must be even and >= 2, got " + std::to_string(dim1));
    }
    if (n_bins == 0) n_bins = dim1;
    if (n_bins < 1 || dim1 % n_bins != 0) {
        throw DimensionError("bin count " + std::to_string(n_bins) + " does not divide " +
                             std::to_string(dim1));
    }
    ScreenModel s;
    s.dim1 = dim1;
    s.kind = kind;
    if (kind == ScreenKind::Dft) {
        s.propagator.resize(dim1, dim1);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dim1));
        for (int k = 0; k < dim1; ++k) {
            for (int j = 0; j < dim1; ++j) {
                // reduce k*j mod dim1 first so the phase stays exact for large indices
                const double angle = 2.0 * std::numbers::pi * ((k * j) % dim1) / dim1;
                s.propagator(k, j) = std::polar(scale, angle);
            }
        }
    } else {
        s.propagator = identity(dim1);
    }
    const int width = dim1 / n_bins;
    for (int b = 0; b < n_bins; ++b) {
        std::vector<int> bin;
        ComplexMatrix P = ComplexMatrix::Zero(dim1, dim1);
        for (int i = b * width; i < (b + 1) * width; ++i) {
            bin.push_back(i);
            P(i, i) = 1.0;
        }
        s.bins.push_back(std::move(bin));
        s.J.push_back(s.propagator.adjoint() * P * s.propagator);
    }
    return s;
}

double max_cross_term(const ScreenModel& screen) {
    const int r1 = screen.dim1 / 2;
    double best = 0.0;
    for (const auto& j : screen.J) {
        best = std::max(best, std::abs(j(0, r1).real()));
    }
    return best;
}

ScreenModel build_screen(int dim1, ScreenKind kind, int n_bins) {
    ScreenModel s = build_screen_unchecked(dim1, kind, n_bins);
    const double cross = max_cross_term(s);
    if (cross <= 1e-3) {
        throw DegenerateScreen("screen '" + std::string(screen_kind_name(kind)) +
                               "' shows no slit cross terms (max " + std::to_string(cross) + ")");
    }
    return s;
}

} // namespace ndetect
