#include "ndetect/linalg.hpp"

#include <cmath>
#include <string>

#include "ndetect/errors.hpp"

namespace ndetect {

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw DimensionError(std::string(what) + " has non-finite entries");
    }
}

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError(std::string(what) + " must be square and non-empty, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (rows > kMaxDimension || cols > kMaxDimension) {
        throw DimensionError("tensor product " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " exceeds the maximum dimension " +
                             std::to_string(kMaxDimension));
    }
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_square(a, "commutator lhs");
    require_square(b, "commutator rhs");
    if (a.rows() != b.rows()) {
        throw DimensionError("commutator operands differ in dimension: " +
                             std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
    }
    return a * b - b * a;
}

ProjectorReport is_projector(const ComplexMatrix& m, double tol) {
    return is_projector(m, Tolerances{tol, tol, tol, tol});
}

ProjectorReport is_projector(const ComplexMatrix& m, const Tolerances& tol) {
    require_square(m, "projector candidate");
    ProjectorReport r;
    r.hermitian_residual = (m - m.adjoint()).norm();
    r.idempotent_residual = (m * m - m).norm();
    r.is_projector = r.hermitian_residual <= tol.hermitian && r.idempotent_residual <= tol.idempotent;
    return r;
}

int projector_rank(const ComplexMatrix& m, double tol) {
    const auto report = is_projector(m, tol);
    if (!report.is_projector) {
        throw NotAProjector("rank requested for a non-projector (hermitian residual " +
                            std::to_string(report.hermitian_residual) + ", idempotent residual " +
                            std::to_string(report.idempotent_residual) + ")");
    }
    const double trace = m.trace().real();
    const double rounded = std::round(trace);
    if (std::abs(trace - rounded) > tol) {
        throw NotAProjector("projector trace " + std::to_string(trace) + " is not integral");
    }
    return static_cast<int>(rounded);
}

double frobenius(const ComplexMatrix& m) { return m.norm(); }

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix ket_bra(const ComplexVector& v) {
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) {
        throw DimensionError("ket_bra of the zero vector");
    }
    return v * v.adjoint() / n2;
}

} // namespace ndetect
