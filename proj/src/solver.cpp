#include "ndetect/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "ndetect/errors.hpp"

namespace ndetect {

namespace {

// Frobenius-orthonormal basis of the n x n Hermitian matrices (real span).
std::vector<ComplexMatrix> hermitian_basis(int n) {
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(i, i) = 1.0;
        out.push_back(std::move(e));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            ComplexMatrix re = ComplexMatrix::Zero(n, n);
            re(i, j) = s;
            re(j, i) = s;
            out.push_back(std::move(re));
            ComplexMatrix im = ComplexMatrix::Zero(n, n);
            im(i, j) = Complex(0.0, s);
            im(j, i) = Complex(0.0, -s);
            out.push_back(std::move(im));
        }
    }
    return out;
}

double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.array().conjugate() * b.array()).sum().real();
}

// Residual vector [Re vec(K^2-K); Im vec(K^2-K); (tr K - target)] and its
// Jacobian with respect to subspace coordinates.
struct Linearization {
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
    double idempotent = 0.0;
};

Linearization linearize(const ConstraintSubspace& sub, const ComplexMatrix& K, std::optional<int> target,
                        bool with_jacobian) {
    const Eigen::Index n2 = K.size();
    const Eigen::Index rows = 2 * n2 + (target ? 1 : 0);
    Linearization lin;
    const ComplexMatrix R = K * K - K;
    lin.idempotent = R.norm();
    lin.residual.resize(rows);
    for (Eigen::Index k = 0; k < n2; ++k) {
        lin.residual(k) = R.data()[k].real();
        lin.residual(n2 + k) = R.data()[k].imag();
    }
    if (target) lin.residual(rows - 1) = K.trace().real() - *target;
    if (!with_jacobian) return lin;

    lin.jacobian.resize(rows, sub.dimension());
    for (int i = 0; i < sub.dimension(); ++i) {
        const ComplexMatrix& B = sub.basis[i];
        const ComplexMatrix dR = B * K + K * B - B;
        for (Eigen::Index k = 0; k < n2; ++k) {
            lin.jacobian(k, i) = dR.data()[k].real();
            lin.jacobian(n2 + k, i) = dR.data()[k].imag();
        }
        if (target) lin.jacobian(rows - 1, i) = B.trace().real();
    }
    return lin;
}

RestartTrace run_restart(const ConstraintSubspace& sub, const SolverOptions& opts, int restart,
                         std::vector<double>& coords_out) {
    RestartTrace trace;
    trace.sub_seed = restart_seed(opts.seed, restart);
    std::mt19937_64 rng(trace.sub_seed);
    std::normal_distribution<double> gauss(0.0, opts.start_scale);
    const int d = sub.dimension();
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = gauss(rng);

    auto point = [&](const Eigen::VectorXd& c) {
        return sub.point(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
    };

    Linearization lin = linearize(sub, point(x), opts.rank_target, true);
    double cost = lin.residual.squaredNorm();
    double damping = 1e-3;
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (lin.idempotent <= 1e-2 * opts.tolerance &&
            (!opts.rank_target || std::abs(lin.residual(lin.residual.size() - 1)) < 0.5)) {
            trace.best_residuals.push_back(std::sqrt(cost));
            break;
        }
        const Eigen::MatrixXd JtJ = lin.jacobian.transpose() * lin.jacobian;
        const Eigen::VectorXd g = lin.jacobian.transpose() * lin.residual;
        bool accepted = false;
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += damping * (1.0 + JtJ.diagonal().array());
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            const Eigen::VectorXd trial = x + step;
            Linearization next = linearize(sub, point(trial), opts.rank_target, false);
            const double trial_cost = next.residual.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                x = trial;
                cost = trial_cost;
                lin = linearize(sub, point(x), opts.rank_target, true);
                damping = std::max(damping / 3.0, 1e-15);
                accepted = true;
            } else {
                damping *= 4.0;
            }
        }
        trace.best_residuals.push_back(std::sqrt(cost));
        if (!accepted) break; // stagnated at a local minimum
    }
    trace.idempotent_residual = lin.idempotent;
    coords_out.assign(x.data(), x.data() + x.size());
    return trace;
}

} // namespace

ComplexMatrix ConstraintSubspace::point(std::span<const double> coords) const {
    if (coords.size() != basis.size()) {
        throw DimensionError("coordinate count does not match subspace dimension");
    }
    ComplexMatrix k = offset;
    for (std::size_t i = 0; i < basis.size(); ++i) k += coords[i] * basis[i];
    return k;
}

std::vector<double> ConstraintSubspace::coordinates(const ComplexMatrix& K) const {
    const ComplexMatrix diff = K - offset;
    std::vector<double> c(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) c[i] = real_inner(basis[i], diff);
    return c;
}

double ConstraintSubspace::membership_residual(const ComplexMatrix& K) const {
    if (K.rows() != dim1 || K.cols() != dim1) {
        throw DimensionError("matrix does not match subspace dimension");
    }
    return (K - point(coordinates(K))).norm();
}

ConstraintSubspace make_subspace(const ComplexMatrix& offset, const std::vector<ComplexMatrix>& directions) {
    require_square(offset, "subspace offset");
    ConstraintSubspace sub;
    sub.dim1 = static_cast<int>(offset.rows());
    for (const auto& d : directions) {
        if (d.rows() != offset.rows() || d.cols() != offset.cols()) {
            throw DimensionError("subspace direction does not match the offset dimension");
        }
        ComplexMatrix v = d;
        for (const auto& b : sub.basis) v -= real_inner(b, v) * b;
        const double n = v.norm();
        if (n > 1e-12 * std::max(1.0, d.norm())) sub.basis.push_back(v / n);
    }
    sub.offset = offset;
    for (const auto& b : sub.basis) sub.offset -= real_inner(b, offset) * b;
    return sub;
}

ConstraintSubspace build_constraint_subspace(const BlockState& psi, double gc3_tol) {
    const double gc3 = psi.gc3_residual();
    if (gc3 > gc3_tol) {
        throw Gc3Violation("constraint subspace needs a detector-compatible state, forbidden norm " +
                               std::to_string(gc3),
                           gc3);
    }
    const int n = psi.layout().dim1();
    const int dim2 = psi.decomp().dim2();
    const ComplexVector v = psi.vector();
    const ComplexVector target = apply_h2(psi.decomp().R(), v, dim2);
    const auto herm = hermitian_basis(n);

    // (K (x) 1) psi = Y psi as a real linear system in the Hermitian coordinates.
    const Eigen::Index rows = 2 * v.size();
    Eigen::MatrixXd M(rows, static_cast<Eigen::Index>(herm.size()));
    for (std::size_t k = 0; k < herm.size(); ++k) {
        const ComplexVector col = apply_h1(herm[k], v, dim2);
        M.col(static_cast<Eigen::Index>(k)) << col.real(), col.imag();
    }
    Eigen::VectorXd rhs(rows);
    rhs << target.real(), target.imag();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = std::max(1e-12, 1e-10 * (sv.size() ? sv(0) : 0.0));
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    const Eigen::MatrixXd& U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(M.cols());
    for (Eigen::Index i = 0; i < rank; ++i) {
        x0 += (U.col(i).dot(rhs) / sv(i)) * V.col(i);
    }

    ConstraintSubspace sub;
    sub.dim1 = n;
    sub.constraint_residual = (M * x0 - rhs).norm();
    if (sub.constraint_residual > 1e-10) {
        throw EmptySubspace("no Hermitian K satisfies the detector constraints (least-squares residual " +
                                std::to_string(sub.constraint_residual) + ")",
                            sub.constraint_residual);
    }
    auto combine = [&](const Eigen::VectorXd& c) {
        ComplexMatrix k = ComplexMatrix::Zero(n, n);
        for (std::size_t i = 0; i < herm.size(); ++i) k += c(static_cast<Eigen::Index>(i)) * herm[i];
        return k;
    };
    sub.offset = combine(x0);
    for (Eigen::Index i = rank; i < M.cols(); ++i) sub.basis.push_back(combine(V.col(i)));
    return sub;
}

void SolverOptions::validate() const {
    if (restarts < 1 || max_iterations < 1 || threads < 1) {
        throw ParameterRange("solver counts must be positive");
    }
    if (!(tolerance > 0.0) || !(tolerance < dedup_distance)) {
        throw ParameterRange("solver tolerance must be positive and below the dedup distance");
    }
    if (!(start_scale > 0.0)) {
        throw ParameterRange("start scale must be positive");
    }
}

double idempotence_objective(const ConstraintSubspace& sub, std::span<const double> coords,
                             std::optional<int> rank_target) {
    return linearize(sub, sub.point(coords), rank_target, false).residual.norm();
}

std::vector<double> idempotence_gradient(const ConstraintSubspace& sub, std::span<const double> coords,
                                         std::optional<int> rank_target) {
    const auto lin = linearize(sub, sub.point(coords), rank_target, true);
    const Eigen::VectorXd g = 2.0 * lin.jacobian.transpose() * lin.residual;
    return {g.data(), g.data() + g.size()};
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6e646574u};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ProjectorSearch find_projector(const ConstraintSubspace& sub, const SolverOptions& opts) {
    opts.validate();
    ProjectorSearch out;
    out.restarts.resize(opts.restarts);
    std::vector<std::vector<double>> coords(opts.restarts);

    if (sub.dimension() == 0) {
        // A single point: no descent possible, just evaluate it.
        for (int r = 0; r < opts.restarts; ++r) {
            out.restarts[r].sub_seed = restart_seed(opts.seed, r);
            out.restarts[r].idempotent_residual = (sub.offset * sub.offset - sub.offset).norm();
            out.restarts[r].best_residuals.push_back(idempotence_objective(sub, {}, opts.rank_target));
        }
    } else {
        const int workers = std::min(opts.threads, opts.restarts);
        auto work = [&](int first) {
            for (int r = first; r < opts.restarts; r += workers) {
                out.restarts[r] = run_restart(sub, opts, r, coords[r]);
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        }
    }

    out.best_residual = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        auto& tr = out.restarts[r];
        out.best_residual = std::min(out.best_residual, tr.idempotent_residual);
        const ComplexMatrix K = sub.point(coords[r]);
        const auto proj = is_projector(K, opts.tolerance);
        bool ok = proj.is_projector;
        if (ok && opts.rank_target) {
            const double t = K.trace().real();
            ok = std::abs(t - *opts.rank_target) <= opts.tolerance;
        }
        tr.converged = ok;
        if (!ok) continue;
        const bool duplicate = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const ComplexMatrix& s) {
            return (s - K).norm() < opts.dedup_distance;
        });
        if (!duplicate) out.solutions.push_back(K);
    }
    return out;
}

SearchReport search_solutions(const BlockState& psi, const SolverOptions& opts, const Tolerances& tol) {
    opts.validate();
    SearchReport rep;
    rep.options = opts;
    const auto images = expected_images(psi, tol.equality);
    const ComplexVector v = psi.vector();
    if (images.e_image.norm() <= tol.nonzero || (v - images.e_image).norm() <= tol.nonzero) {
        rep.rejection = "degenerate state: the slit-1 image is zero or the whole state";
        return rep;
    }
    if (images.g_image.norm() <= tol.nonzero || (v - images.g_image).norm() <= tol.nonzero) {
        rep.rejection = "degenerate state: the detector image (a and gamma components) is zero or the whole state";
        return rep;
    }

    ConstraintSubspace sub;
    try {
        sub = build_constraint_subspace(psi, tol.equality);
    } catch (const EmptySubspace& e) {
        rep.constraint_residual = e.residual();
        rep.best_residual = e.residual();
        return rep;
    }
    rep.subspace_dimension = sub.dimension();
    rep.constraint_residual = sub.constraint_residual;
    rep.search = find_projector(sub, opts);
    rep.best_residual = rep.constraint_residual + rep.search.best_residual;

    for (const auto& K : rep.search.solutions) {
        ProblemInstance inst{psi.layout(), psi.decomp(), K, psi, "search", {}};
        if (check_problem(inst, tol).verdict) rep.instances.push_back(std::move(inst));
    }
    return rep;
}

} // namespace ndetect
