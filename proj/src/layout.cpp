#include "ndetect/layout.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ndetect/errors.hpp"

namespace ndetect {

SlitLayout::SlitLayout(int m) : m_(m) {
    if (m < 1) {
        throw DimensionError("slit layout needs m >= 1, got " + std::to_string(m));
    }
    if (2 * static_cast<Eigen::Index>(m) > kMaxDimension) {
        throw DimensionError("slit layout exceeds the maximum dimension");
    }
}

ComplexMatrix SlitLayout::L() const {
    ComplexMatrix l = ComplexMatrix::Zero(dim1(), dim1());
    l.topLeftCorner(m_, m_).setIdentity();
    return l;
}

std::string_view cavity_name(Cavity c) {
    switch (c) {
    case Cavity::A: return "A";
    case Cavity::B: return "B";
    case Cavity::C: return "C";
    case Cavity::D: return "D";
    }
    return "?";
}

CavityDecomposition::CavityDecomposition(int rA, int rB, int rC, int rD) : ranks_{rA, rB, rC, rD} {
    for (int r : ranks_) {
        if (r < 0) {
            throw DimensionError("cavity ranks must be non-negative");
        }
    }
    if (dim2() == 0) {
        throw DimensionError("cavity decomposition has total dimension 0");
    }
}

int CavityDecomposition::offset(Cavity c) const noexcept {
    return std::accumulate(ranks_.begin(), ranks_.begin() + static_cast<int>(c), 0);
}

int CavityDecomposition::dim2() const noexcept {
    return std::accumulate(ranks_.begin(), ranks_.end(), 0);
}

ComplexMatrix CavityDecomposition::projector(Cavity c) const {
    ComplexMatrix p = ComplexMatrix::Zero(dim2(), dim2());
    const int o = offset(c);
    for (int i = 0; i < rank(c); ++i) {
        p(o + i, o + i) = 1.0;
    }
    return p;
}

ComplexMatrix CavityDecomposition::S() const { return projector(Cavity::A) + projector(Cavity::B); }

ComplexMatrix CavityDecomposition::R() const { return projector(Cavity::A) + projector(Cavity::C); }

BlockState::BlockState(SlitLayout layout, CavityDecomposition decomp, std::vector<ComplexVector> x,
                       std::vector<ComplexVector> y)
    : layout_(layout), decomp_(decomp), x_(std::move(x)), y_(std::move(y)) {
    const auto m = static_cast<std::size_t>(layout_.m());
    if (x_.size() != m || y_.size() != m) {
        throw DimensionError("block state needs " + std::to_string(m) +
                             " components per slit, got " + std::to_string(x_.size()) + " and " +
                             std::to_string(y_.size()));
    }
    for (const auto* side : {&x_, &y_}) {
        for (const auto& v : *side) {
            if (v.size() != decomp_.dim2()) {
                throw DimensionError("block state component has dimension " +
                                     std::to_string(v.size()) + ", expected " +
                                     std::to_string(decomp_.dim2()));
            }
            if (!v.allFinite()) {
                throw DimensionError("block state component has non-finite entries");
            }
        }
    }
}

BlockState BlockState::from_vector(const SlitLayout& layout, const CavityDecomposition& decomp,
                                   const ComplexVector& psi) {
    const int d2 = decomp.dim2();
    if (psi.size() != layout.dim1() * d2) {
        throw DimensionError("state vector has dimension " + std::to_string(psi.size()) +
                             ", expected " + std::to_string(layout.dim1() * d2));
    }
    std::vector<ComplexVector> x, y;
    for (int j = 0; j < layout.m(); ++j) {
        x.emplace_back(psi.segment(j * d2, d2));
        y.emplace_back(psi.segment((layout.m() + j) * d2, d2));
    }
    return BlockState(layout, decomp, std::move(x), std::move(y));
}

ComplexVector BlockState::vector() const {
    const int d2 = decomp_.dim2();
    ComplexVector psi(dim());
    for (int j = 0; j < layout_.m(); ++j) {
        psi.segment(j * d2, d2) = x_[j];
        psi.segment((layout_.m() + j) * d2, d2) = y_[j];
    }
    return psi;
}

double BlockState::norm() const { return vector().norm(); }

ComplexVector BlockState::slit1_component(int j, Cavity c) const {
    return x_.at(j).segment(decomp_.offset(c), decomp_.rank(c));
}

ComplexVector BlockState::slit2_component(int j, Cavity c) const {
    return y_.at(j).segment(decomp_.offset(c), decomp_.rank(c));
}

double BlockState::gc3_residual() const {
    double sq = 0.0;
    for (int j = 0; j < layout_.m(); ++j) {
        sq += slit1_component(j, Cavity::C).squaredNorm() + slit1_component(j, Cavity::D).squaredNorm();
        sq += slit2_component(j, Cavity::A).squaredNorm() + slit2_component(j, Cavity::B).squaredNorm();
    }
    return std::sqrt(sq);
}

BlockState assemble_state(const SlitLayout& layout, const CavityDecomposition& decomp,
                          std::vector<ComplexVector> x, std::vector<ComplexVector> y,
                          bool strict_gc3, double tol) {
    BlockState raw(layout, decomp, std::move(x), std::move(y));
    const double n = raw.norm();
    if (n == 0.0) {
        throw DimensionError("cannot assemble a state from the zero vector");
    }
    BlockState state = BlockState::from_vector(layout, decomp, raw.vector() / n);
    if (strict_gc3) {
        const double r = state.gc3_residual();
        if (r > tol) {
            throw Gc3Violation("state is not detector-compatible: forbidden components have norm " +
                                   std::to_string(r),
                               r);
        }
    }
    return state;
}

LiftedOperators lift_operators(const SlitLayout& layout, const CavityDecomposition& decomp,
                               const std::optional<ComplexMatrix>& K) {
    const ComplexMatrix one1 = identity(layout.dim1());
    const ComplexMatrix one2 = identity(decomp.dim2());
    const ComplexMatrix one = identity(layout.dim1() * decomp.dim2());
    LiftedOperators ops;
    ops.E = tensor_product(layout.L(), one2);
    ops.Ep = one - ops.E;
    ops.T = tensor_product(one1, decomp.S());
    ops.Tp = one - ops.T;
    ops.Y = tensor_product(one1, decomp.R());
    if (K) {
        if (K->rows() != layout.dim1() || K->cols() != layout.dim1()) {
            throw DimensionError("K is " + std::to_string(K->rows()) + "x" +
                                 std::to_string(K->cols()) + " but the layout has dim1 = " +
                                 std::to_string(layout.dim1()));
        }
        ops.G = tensor_product(*K, one2);
        ops.Gp = one - *ops.G;
    }
    return ops;
}

namespace {
using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

ComplexVector apply_h1(const ComplexMatrix& W, const ComplexVector& psi, int dim2) {
    const Eigen::Index dim1 = psi.size() / dim2;
    if (W.cols() != dim1 || W.rows() != dim1 || dim1 * dim2 != psi.size()) {
        throw DimensionError("H1 operator does not match the state dimension");
    }
    Eigen::Map<const RowMajorMatrix> in(psi.data(), dim1, dim2);
    RowMajorMatrix out = W * in;
    return Eigen::Map<const ComplexVector>(out.data(), out.size());
}

ComplexVector apply_h2(const ComplexMatrix& X, const ComplexVector& psi, int dim2) {
    const Eigen::Index dim1 = psi.size() / dim2;
    if (X.cols() != dim2 || X.rows() != dim2 || dim1 * dim2 != psi.size()) {
        throw DimensionError("H2 operator does not match the state dimension");
    }
    Eigen::Map<const RowMajorMatrix> in(psi.data(), dim1, dim2);
    RowMajorMatrix out = in * X.transpose();
    return Eigen::Map<const ComplexVector>(out.data(), out.size());
}

ExpectedImages expected_images(const BlockState& state, double tol) {
    const double r = state.gc3_residual();
    if (r > tol) {
        throw Gc3Violation("expected images need a detector-compatible state, forbidden norm " +
                               std::to_string(r),
                           r);
    }
    const auto& dec = state.decomp();
    const int m = state.layout().m();
    std::vector<ComplexVector> ex, ey, gx, gy;
    const ComplexMatrix S = dec.S();
    const ComplexMatrix A = dec.projector(Cavity::A);
    const ComplexMatrix C = dec.projector(Cavity::C);
    for (int j = 0; j < m; ++j) {
        ex.emplace_back(S * state.x()[j]);
        ey.emplace_back(ComplexVector::Zero(dec.dim2()));
        gx.emplace_back(A * state.x()[j]);
        gy.emplace_back(C * state.y()[j]);
    }
    return ExpectedImages{BlockState(state.layout(), dec, ex, ey).vector(),
                          BlockState(state.layout(), dec, gx, gy).vector()};
}

} // namespace ndetect
