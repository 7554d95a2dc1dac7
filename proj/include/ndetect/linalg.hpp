#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace ndetect {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Largest row or column count any operator may reach.
inline constexpr Eigen::Index kMaxDimension = 4096;

/**
 * Numerical tolerances shared by the operator core and the checker.
 *
 * Equality checks compare against `equality` (or the two projector
 * residuals); "is nonzero" checks require a value strictly above `nonzero`.
 * Keeping the two bands apart stops borderline instances from flapping.
 */
struct Tolerances {
    double hermitian = 1e-12;
    double idempotent = 1e-10;
    double equality = 1e-10;
    double nonzero = 1e-6;
};

struct ProjectorReport {
    bool is_projector = false;
    double hermitian_residual = 0.0;  ///< ||M - M^dagger||_F
    double idempotent_residual = 0.0; ///< ||M^2 - M||_F
};

void require_finite(const ComplexMatrix& m, const char* what);
void require_square(const ComplexMatrix& m, const char* what);

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// ab - ba for square matrices of equal size.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

ProjectorReport is_projector(const ComplexMatrix& m, double tol);
ProjectorReport is_projector(const ComplexMatrix& m, const Tolerances& tol);

/// Rank of a verified projector, read off as its rounded trace.
/// Throws NotAProjector if either projector residual exceeds `tol` or the
/// trace is further than `tol` from an integer.
int projector_rank(const ComplexMatrix& m, double tol = 1e-10);

double frobenius(const ComplexMatrix& m);

ComplexMatrix identity(Eigen::Index n);

/// Orthogonal projector onto span{v} (v need not be normalized).
ComplexMatrix ket_bra(const ComplexVector& v);

} // namespace ndetect
