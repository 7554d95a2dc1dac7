#pragma once

#include <string_view>
#include <vector>

#include "ndetect/linalg.hpp"

namespace ndetect {

enum class ScreenKind { Dft, Identity };

ScreenKind parse_screen_kind(std::string_view name);
std::string_view screen_kind_name(ScreenKind kind);

/**
 * Discretized final screen on H1.
 *
 * A unitary propagator U maps slit-plane amplitudes to screen amplitudes;
 * bin Delta collects a set of post-propagation basis indices, giving the
 * localization projector J(Delta) = U^dagger P_Delta U. Bins partition
 * {0..dim1-1}, so the J(Delta) resolve the identity.
 */
struct ScreenModel {
    int dim1 = 0;
    ScreenKind kind = ScreenKind::Dft;
    ComplexMatrix propagator;
    std::vector<std::vector<int>> bins;
    std::vector<ComplexMatrix> J;

    int n_bins() const noexcept { return static_cast<int>(bins.size()); }
};

/// Largest |Re <e_1 | J(Delta) r_1>| over bins: the cross-term visibility
/// between the first basis vectors of each slit.
double max_cross_term(const ScreenModel& screen);

/// Builds a screen with `n_bins` contiguous bins of equal width (0 means
/// singleton bins). Throws DimensionError if n_bins does not divide dim1 and
/// DegenerateScreen if max_cross_term is at most 1e-3.
ScreenModel build_screen(int dim1, ScreenKind kind = ScreenKind::Dft, int n_bins = 0);

/// Same construction without the visibility check.
ScreenModel build_screen_unchecked(int dim1, ScreenKind kind, int n_bins);

} // namespace ndetect
