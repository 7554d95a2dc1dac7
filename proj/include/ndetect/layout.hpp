#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "ndetect/linalg.hpp"

namespace ndetect {

/// Two symmetric slits on H1 = C^(2m). Basis order: e_1..e_m (slit 1), then
/// r_1..r_m (slit 2). L projects onto the slit-1 block.
class SlitLayout {
  public:
    explicit SlitLayout(int m);

    int m() const noexcept { return m_; }
    int dim1() const noexcept { return 2 * m_; }
    ComplexMatrix L() const;

    friend bool operator==(const SlitLayout&, const SlitLayout&) = default;

  private:
    int m_;
};

enum class Cavity { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<Cavity, 4> kCavities{Cavity::A, Cavity::B, Cavity::C, Cavity::D};

std::string_view cavity_name(Cavity c);

/// Orthogonal resolution of the identity on H2 into A, B, C, D, laid out as
/// consecutive basis blocks in that order.
class CavityDecomposition {
  public:
    CavityDecomposition(int rA, int rB, int rC, int rD);

    int rank(Cavity c) const noexcept { return ranks_[static_cast<int>(c)]; }
    int offset(Cavity c) const noexcept;
    int dim2() const noexcept;

    ComplexMatrix projector(Cavity c) const;
    /// S = A + B, the slit detector on H2.
    ComplexMatrix S() const;
    /// R = A + C, the detector of the incompatible property on H2.
    ComplexMatrix R() const;

    friend bool operator==(const CavityDecomposition&, const CavityDecomposition&) = default;

  private:
    std::array<int, 4> ranks_;
};

/**
 * State vector in H1 (x) H2 stored as the per-basis-vector H2 components:
 * x[j] pairs with e_{j+1}, y[k] with r_{k+1}. The flattened vector follows
 * the Kronecker ordering [x_1, ..., x_m, y_1, ..., y_m].
 */
class BlockState {
  public:
    BlockState(SlitLayout layout, CavityDecomposition decomp, std::vector<ComplexVector> x,
               std::vector<ComplexVector> y);

    static BlockState from_vector(const SlitLayout& layout, const CavityDecomposition& decomp,
                                  const ComplexVector& psi);

    const SlitLayout& layout() const noexcept { return layout_; }
    const CavityDecomposition& decomp() const noexcept { return decomp_; }
    const std::vector<ComplexVector>& x() const noexcept { return x_; }
    const std::vector<ComplexVector>& y() const noexcept { return y_; }

    int dim() const noexcept { return layout_.dim1() * decomp_.dim2(); }
    ComplexVector vector() const;
    double norm() const;

    /// Component of x_{j} (slit 1) or y_{j} (slit 2) inside one cavity block.
    ComplexVector slit1_component(int j, Cavity c) const;
    ComplexVector slit2_component(int j, Cavity c) const;

    /// Norm of the components the detector-compatible form forbids:
    /// c_j, d_j on the slit-1 side and alpha_k, beta_k on the slit-2 side.
    double gc3_residual() const;

  private:
    SlitLayout layout_;
    CavityDecomposition decomp_;
    std::vector<ComplexVector> x_;
    std::vector<ComplexVector> y_;
};

/// Normalizes the given components into a BlockState. Throws DimensionError
/// on the zero vector and, when `strict_gc3` is set, Gc3Violation if any
/// forbidden component exceeds `tol`.
BlockState assemble_state(const SlitLayout& layout, const CavityDecomposition& decomp,
                          std::vector<ComplexVector> x, std::vector<ComplexVector> y,
                          bool strict_gc3 = false, double tol = 1e-10);

struct LiftedOperators {
    ComplexMatrix E, Ep; ///< L (x) 1 and its complement
    ComplexMatrix T, Tp; ///< 1 (x) S and its complement
    ComplexMatrix Y;     ///< 1 (x) R
    std::optional<ComplexMatrix> G, Gp; ///< K (x) 1 and complement, when K is given
};

LiftedOperators lift_operators(const SlitLayout& layout, const CavityDecomposition& decomp,
                               const std::optional<ComplexMatrix>& K = std::nullopt);

/// Operators of the form W (x) 1 or 1 (x) X applied without materializing the
/// full Kronecker product.
ComplexVector apply_h1(const ComplexMatrix& W, const ComplexVector& psi, int dim2);
ComplexVector apply_h2(const ComplexMatrix& X, const ComplexVector& psi, int dim2);

struct ExpectedImages {
    ComplexVector e_image; ///< keeps a_j, b_j on the slit-1 side
    ComplexVector g_image; ///< keeps a_j on slit 1 and gamma_k on slit 2
};

/// Images E psi and G psi implied by the detector constraints, obtained by
/// masking components. Throws Gc3Violation if the state is not
/// detector-compatible within `tol`.
ExpectedImages expected_images(const BlockState& state, double tol = 1e-10);

} // namespace ndetect
