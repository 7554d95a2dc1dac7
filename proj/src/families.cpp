#include "ndetect/families.hpp"

#include <cmath>
#include <random>

#include "ndetect/errors.hpp"

namespace ndetect {

namespace {

const Complex kI(0.0, 1.0);

ComplexVector basis_vector(int dim, int index, Complex amplitude = 1.0) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = amplitude;
    return v;
}

// One-dimensional cavities: slot 0 = A, 1 = B, 2 = C, 3 = D.
ComplexVector cavity_vector(Cavity c, Complex amplitude) {
    return basis_vector(4, static_cast<int>(c), amplitude);
}

void require_open_interval(double v, double lo, double hi, const char* name) {
    if (!(v > lo && v < hi)) {
        throw ParameterRange(std::string(name) + " = " + std::to_string(v) + " must lie in (" +
                             std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
}

void require_verified(const ProblemInstance& inst, const char* what) {
    const auto rep = check_problem(inst);
    if (!rep.verdict) {
        throw SolverFailure(std::string(what) + " did not pass the condition check",
                            rep.k_projector.idempotent_residual);
    }
}

} // namespace

ComplexMatrix dim4_sym_matrix(double q, double theta) {
    const Complex w = std::polar(std::sqrt((0.5 - q) * q), theta);
    const Complex wc = std::conj(w);
    ComplexMatrix k(4, 4);
    k << 1.0 - q, q, -w, w,
         q, 1.0 - q, w, -w,
         -wc, wc, q, -q,
         wc, -wc, -q, q;
    return k;
}

ComplexMatrix dim6_matrix(double p, double theta) {
    const Complex s = std::polar(std::sqrt(p * (0.5 - p)), theta);
    const Complex sc = std::conj(s);
    const double h = 0.5 - p;
    ComplexMatrix k(6, 6);
    k << p, -p, 0, s, -s, 0,
         -p, p, 0, -s, s, 0,
         0, 0, 1, 0, 0, 0,
         sc, -sc, 0, h, -h, 0,
         -sc, sc, 0, -h, h, 0,
         0, 0, 0, 0, 0, 1;
    return k;
}

ComplexMatrix mu0_pattern(Complex lambda, double p, double q, Complex u) {
    const Complex lu = lambda * u;
    ComplexMatrix k(4, 4);
    k << 1, 0, 0, 0,
         0, p, -lu, u,
         0, -std::conj(lu), std::norm(lambda) * q, -std::conj(lambda) * q,
         0, std::conj(u), -lambda * q, q;
    return k;
}

BlockState dim4_case_b_state(Complex a1, Complex delta1, Complex mu, Complex lambda) {
    const SlitLayout layout(2);
    const CavityDecomposition decomp(1, 1, 1, 1);
    return assemble_state(layout, decomp,
                          {cavity_vector(Cavity::A, a1), cavity_vector(Cavity::A, mu * a1)},
                          {cavity_vector(Cavity::D, delta1), cavity_vector(Cavity::D, lambda * delta1)},
                          true);
}

BlockState dim6_pattern_state(Complex b1, Complex a3, Complex delta1, Complex gamma3, Complex mu,
                              Complex lambda) {
    const SlitLayout layout(3);
    const CavityDecomposition decomp(1, 1, 1, 1);
    return assemble_state(layout, decomp,
                          {cavity_vector(Cavity::B, b1), cavity_vector(Cavity::B, mu * b1),
                           cavity_vector(Cavity::A, a3)},
                          {cavity_vector(Cavity::D, delta1), cavity_vector(Cavity::D, lambda * delta1),
                           cavity_vector(Cavity::C, gamma3)},
                          true);
}

Dim6Amplitudes::Dim6Amplitudes() {
    const double a = 1.0 / std::sqrt(6.0);
    b1 = a3 = delta1 = gamma3 = a;
}

ProblemInstance family_dim4_sym(double q, double theta, const Dim4Amplitudes& amps) {
    require_open_interval(q, 0.0, 0.5, "q");
    BlockState psi = dim4_case_b_state(amps.a1, amps.delta1, 1.0, 1.0);
    return ProblemInstance{psi.layout(), psi.decomp(), dim4_sym_matrix(q, theta), psi, "dim4_sym",
                           {{"q", q}, {"theta", theta}}};
}

Mu0Completion solve_mu0_completion(Complex lambda, double p, double theta, std::uint64_t seed) {
    const ComplexMatrix base = mu0_pattern(lambda, p, 0.0, 0.0);
    const ComplexMatrix dq = mu0_pattern(lambda, p, 1.0, 0.0) - base;
    const ComplexMatrix du = mu0_pattern(lambda, p, 0.0, std::polar(1.0, theta)) - base;
    const ConstraintSubspace sub = make_subspace(base, {dq, du});

    SolverOptions opts;
    opts.rank_target = 2;
    opts.restarts = 16;
    opts.seed = seed;
    const auto found = find_projector(sub, opts);

    Mu0Completion best;
    best.idempotent_residual = found.best_residual;
    for (const auto& K : found.solutions) {
        const double q = K(3, 3).real();
        // The sign of |u| is free for a projector; pin arg(u) = theta.
        const Complex u = std::polar(std::abs(K(1, 3)), theta);
        const ComplexMatrix pinned = mu0_pattern(lambda, p, q, u);
        const double res = (pinned * pinned - pinned).norm();
        if (std::abs(u) > 1e-8 && res <= opts.tolerance) {
            return Mu0Completion{q, u, res};
        }
        best.idempotent_residual = std::min(best.idempotent_residual, res);
    }
    throw SolverFailure("no idempotent completion of the mu = 0 pattern", best.idempotent_residual);
}

ProblemInstance family_dim4_mu0(Complex lambda, double p, double theta) {
    if (std::abs(lambda) == 0.0) throw ParameterRange("lambda must be nonzero");
    require_open_interval(p, 0.0, 1.0, "p");
    const auto completion = solve_mu0_completion(lambda, p, theta);
    const Complex amp = 1.0;
    BlockState psi = dim4_case_b_state(amp, amp, 0.0, lambda);
    ProblemInstance inst{psi.layout(), psi.decomp(), mu0_pattern(lambda, p, completion.q, completion.u), psi,
                         "dim4_mu0",
                         {{"lambda_re", lambda.real()}, {"lambda_im", lambda.imag()}, {"p", p}, {"theta", theta}}};
    require_verified(inst, "mu = 0 completion");
    return inst;
}

ConstraintSubspace dim4_general_ansatz(Complex lambda, Complex mu) {
    if (std::abs(lambda) == 0.0 || std::abs(mu) == 0.0) {
        throw ParameterRange("lambda and mu must be nonzero");
    }
    // P fixes a = (1, mu), U and V vanish on a and on delta = (1, lambda),
    // Q annihilates delta. Parameters enter affinely.
    const Complex mub = std::conj(mu);
    const Complex lb = std::conj(lambda);
    auto build = [&](double p, double q, Complex u) {
        ComplexMatrix k = ComplexMatrix::Zero(4, 4);
        k(0, 0) = 1.0 - std::norm(mu) * (1.0 - p);
        k(0, 1) = mub * (1.0 - p);
        k(1, 0) = mu * (1.0 - p);
        k(1, 1) = p;
        ComplexMatrix U(2, 2);
        U << -lambda * u, u, lambda * u / mub, -u / mub;
        k.topRightCorner(2, 2) = U;
        k.bottomLeftCorner(2, 2) = U.adjoint();
        k(2, 2) = std::norm(lambda) * q;
        k(2, 3) = -lb * q;
        k(3, 2) = -lambda * q;
        k(3, 3) = q;
        return k;
    };
    const ComplexMatrix base = build(0.0, 0.0, 0.0);
    return make_subspace(base, {build(1.0, 0.0, 0.0) - base, build(0.0, 1.0, 0.0) - base,
                                build(0.0, 0.0, 1.0) - base, build(0.0, 0.0, kI) - base});
}

ProblemInstance family_dim4_general(Complex lambda, Complex mu, std::uint64_t seed, int restarts) {
    const ConstraintSubspace sub = dim4_general_ansatz(lambda, mu);
    SolverOptions opts;
    opts.rank_target = 2;
    opts.restarts = restarts;
    opts.seed = seed;
    const auto found = find_projector(sub, opts);
    const double amp = 1.0;
    BlockState psi = dim4_case_b_state(amp, amp, mu, lambda);
    for (const auto& K : found.solutions) {
        ProblemInstance inst{psi.layout(), psi.decomp(), K, psi, "dim4_general",
                             {{"lambda_re", lambda.real()},
                              {"lambda_im", lambda.imag()},
                              {"mu_re", mu.real()},
                              {"mu_im", mu.imag()}}};
        if (check_problem(inst).verdict) return inst;
    }
    throw SolverFailure("no rank-2 projector in the dim-4 ansatz after " + std::to_string(restarts) +
                            " restarts",
                        found.best_residual);
}

ProblemInstance mirror_instance(const ProblemInstance& instance) {
    const int m = instance.layout.m();
    const int dim1 = instance.layout.dim1();
    ComplexMatrix swap = ComplexMatrix::Zero(dim1, dim1);
    for (int j = 0; j < m; ++j) {
        swap(j, m + j) = 1.0;
        swap(m + j, j) = 1.0;
    }
    const auto& d = instance.decomp;
    const CavityDecomposition mirrored(d.rank(Cavity::C), d.rank(Cavity::D), d.rank(Cavity::A),
                                       d.rank(Cavity::B));
    auto relabel = [&](const ComplexVector& v) {
        ComplexVector out(v.size());
        out << v.segment(d.offset(Cavity::C), d.rank(Cavity::C)), v.segment(d.offset(Cavity::D), d.rank(Cavity::D)),
            v.segment(d.offset(Cavity::A), d.rank(Cavity::A)), v.segment(d.offset(Cavity::B), d.rank(Cavity::B));
        return out;
    };
    std::vector<ComplexVector> x, y;
    for (int j = 0; j < m; ++j) {
        x.push_back(relabel(instance.psi.y()[j]));
        y.push_back(relabel(instance.psi.x()[j]));
    }
    BlockState psi(instance.layout, mirrored, std::move(x), std::move(y));
    std::optional<ComplexMatrix> K;
    if (instance.K) K = swap * *instance.K * swap;
    auto params = instance.params;
    return ProblemInstance{instance.layout, mirrored, K, psi, instance.family + "_mirror", params};
}

ProblemInstance embed_instance(const ProblemInstance& instance, int m, std::uint64_t seed) {
    const int m0 = instance.layout.m();
    if (m < m0) throw ParameterRange("embedding needs m >= " + std::to_string(m0));
    const SlitLayout layout(m);
    const int dim1 = layout.dim1();
    const int dim2 = instance.decomp.dim2();
    ComplexMatrix pad = ComplexMatrix::Zero(dim1, 2 * m0);
    for (int j = 0; j < m0; ++j) {
        pad(j, j) = 1.0;
        pad(m + j, m0 + j) = 1.0;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_unitary = [&](int n) {
        ComplexMatrix z(n, n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) z(i, k) = Complex(g(rng), g(rng));
        }
        Eigen::HouseholderQR<ComplexMatrix> qr(z);
        return ComplexMatrix(qr.householderQ());
    };
    ComplexMatrix W = ComplexMatrix::Zero(dim1, dim1);
    W.topLeftCorner(m, m) = random_unitary(m);
    W.bottomRightCorner(m, m) = random_unitary(m);
    const ComplexMatrix map = W * pad;
    using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const ComplexVector old = instance.psi.vector();
    const RowMajor moved = map * Eigen::Map<const RowMajor>(old.data(), 2 * m0, dim2);
    const ComplexVector v = Eigen::Map<const ComplexVector>(moved.data(), moved.size());
    BlockState psi = BlockState::from_vector(layout, instance.decomp, v);
    std::optional<ComplexMatrix> K;
    if (instance.K) K = map * *instance.K * map.adjoint();
    auto params = instance.params;
    params["embed_m"] = m;
    params["embed_seed"] = static_cast<double>(seed);
    return ProblemInstance{layout, instance.decomp, K, psi, instance.family + "_embedded", params};
}

ProblemInstance family_dim6(double p, double theta, const Dim6Amplitudes& amps) {
    require_open_interval(p, 0.0, 0.5, "p");
    BlockState psi = dim6_pattern_state(amps.b1, amps.a3, amps.delta1, amps.gamma3);
    return ProblemInstance{psi.layout(), psi.decomp(), dim6_matrix(p, theta), psi, "dim6",
                           {{"p", p}, {"theta", theta}}};
}

ProblemInstance EraserInstance::instance() const {
    return ProblemInstance{layout, decomp, std::nullopt, psi, "eraser", {}};
}

EraserInstance eraser_instance() {
    const double h = 1.0 / std::sqrt(2.0);
    const SlitLayout layout(1);
    const CavityDecomposition decomp(1, 0, 0, 1);
    EraserInstance e{layout, decomp,
                  BlockState(layout, decomp, {basis_vector(2, 0, h)}, {basis_vector(2, 1, h)}),
                  {}, {}, {}, {}, {}, {}};
    const ComplexMatrix one = identity(2);
    ComplexVector plus(2);
    plus << h, h;
    e.Kplus = ket_bra(plus); // psi_+ in H1 and |+> in H2 share coordinates
    e.Rplus = ket_bra(plus);
    e.E = tensor_product(layout.L(), one);
    e.T = tensor_product(one, decomp.S());
    e.Eplus = tensor_product(e.Kplus, one);
    e.Tplus = tensor_product(one, e.Rplus);
    return e;
}

ApparatusInstance apparatus_instance() {
    // Regions u, c, d of each slit are basis vectors 1, 2, 3. The state puts
    // u and c of slit 1 on cavity A and d on B; u and c of slit 2 on D and d
    // on C. K is the dim-6 matrix at p = 1/4, theta = 0 conjugated by the
    // slit-1 reflection exchanging (e_1 + e_2)/sqrt(2) with e_3, which is the
    // relabeling that carries the (b, b, a) slit-1 pattern onto (a, a, b).
    const double a = 1.0 / std::sqrt(6.0);
    const SlitLayout layout(3);
    const CavityDecomposition decomp(1, 1, 1, 1);
    BlockState psi = assemble_state(
        layout, decomp,
        {cavity_vector(Cavity::A, a), cavity_vector(Cavity::A, a), cavity_vector(Cavity::B, a)},
        {cavity_vector(Cavity::D, a), cavity_vector(Cavity::D, a), cavity_vector(Cavity::C, a)}, true);
    ComplexMatrix K(6, 6);
    K << 0.75, 0.25, 0, 0.25, -0.25, 0,
         0.25, 0.75, 0, -0.25, 0.25, 0,
         0, 0, 0, 0, 0, 0,
         0.25, -0.25, 0, 0.25, -0.25, 0,
         -0.25, 0.25, 0, -0.25, 0.25, 0,
         0, 0, 0, 0, 0, 1;
    ApparatusInstance out{ProblemInstance{layout, decomp, K, psi, "apparatus", {}},
                     {Inference{1, true}, Inference{1, false}, Inference{2, true}, Inference{2, false}}};
    return out;
}

BlockState random_dim2_state(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto z = [&] { return Complex(g(rng), g(rng)); };
    const Complex a = z(), b = z(), gamma = z(), delta = z();
    ComplexVector x(4), y(4);
    x << a, b, 0, 0;
    y << 0, 0, gamma, delta;
    return assemble_state(SlitLayout(1), CavityDecomposition(1, 1, 1, 1), {x}, {y}, true);
}

Dim2Certificate dim2_infeasibility(int trials, std::uint64_t seed, const SolverOptions& base) {
    if (trials < 1) throw ParameterRange("trials must be >= 1");
    Dim2Certificate cert;

    // Exact branch. With K = [[p, u], [conj(u), q]] and u != 0, the detector
    // constraints give u gamma = u delta = 0 and conj(u) a = conj(u) b = 0: a
    // homogeneous system in (a, b, gamma, delta). Its coefficient matrix is u
    // or conj(u) times a permutation, so its rank is checked exactly at u = 1
    // and u = i; full rank means only psi = 0 survives.
    int kernel = 0;
    for (Complex u : {Complex(1.0, 0.0), kI}) {
        Eigen::Matrix4cd sys = Eigen::Matrix4cd::Zero();
        sys(0, 2) = u;            // sum_l u gamma_l = 0
        sys(1, 3) = u;            // sum_l u delta_l = 0
        sys(2, 0) = std::conj(u); // sum_i v a_i = 0
        sys(3, 1) = std::conj(u); // sum_i v b_i = 0
        Eigen::FullPivLU<Eigen::Matrix4cd> lu(sys);
        kernel = std::max(kernel, static_cast<int>(lu.dimensionOfKernel()));
    }
    cert.kernel_dimension = kernel;
    cert.exact_infeasible = kernel == 0;
    cert.derivation = {
        "K = [[p, u], [conj(u), q]] with u != 0 (otherwise [L, K] = 0)",
        "u gamma = 0 and u delta = 0 force gamma = delta = 0",
        "conj(u) a = 0 and conj(u) b = 0 force a = b = 0",
        "kernel dimension " + std::to_string(kernel) + ": psi = 0, contradicting normalization",
    };

    // Stochastic branch.
    SolverOptions opts = base;
    opts.restarts = std::min(opts.restarts, 4);
    cert.trials = trials;
    cert.best_residual = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const BlockState psi = random_dim2_state(restart_seed(seed, t));
        opts.seed = restart_seed(seed ^ 0x9e3779b97f4a7c15ull, t);
        const auto rep = search_solutions(psi, opts);
        if (rep.rejection) {
            ++cert.rejected_degenerate;
            continue;
        }
        cert.solutions_found += static_cast<int>(rep.instances.size());
        cert.best_residual = std::min(cert.best_residual, rep.best_residual);
    }
    return cert;
}

namespace {

// Rank of a set of vectors with the relative singular-value threshold 1e-8.
int numeric_rank(const std::vector<ComplexVector>& cols) {
    if (cols.empty() || cols.front().size() == 0) return 0;
    ComplexMatrix M(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = cols[i];
    Eigen::JacobiSVD<ComplexMatrix> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 1e-14) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-8 * s(0)) ++r;
    }
    return r;
}

// Coefficient c with second = c * first, if the pair is dependent and first != 0.
std::optional<Complex> dependence(const ComplexVector& first, const ComplexVector& second) {
    const double n = first.squaredNorm();
    if (n <= 1e-28) return std::nullopt;
    const Complex c = first.dot(second) / n;
    if ((second - c * first).norm() > 1e-8 * std::max(1.0, second.norm())) return std::nullopt;
    return c;
}

} // namespace

CaseLabel classify_case(const BlockState& psi) {
    if (psi.gc3_residual() > 1e-10) {
        throw Gc3Violation("case classification needs a detector-compatible state", psi.gc3_residual());
    }
    const int m = psi.layout().m();
    if (m != 2 && m != 3) {
        throw DimensionError("case classification is defined for m = 2 and m = 3, got m = " + std::to_string(m));
    }
    double x_norm = 0.0, y_norm = 0.0;
    for (int j = 0; j < m; ++j) {
        x_norm += psi.x()[j].squaredNorm();
        y_norm += psi.y()[j].squaredNorm();
    }
    if (x_norm <= 1e-20 || y_norm <= 1e-20) {
        throw DegenerateState("case classification needs both slit sides to be nonzero");
    }

    CaseLabel out;
    std::vector<ComplexVector> b, delta;
    for (int j = 0; j < 2; ++j) {
        b.push_back(psi.slit1_component(j, Cavity::B));
        delta.push_back(psi.slit2_component(j, Cavity::D));
    }
    out.b_dependent = numeric_rank(b) < 2;
    out.delta_dependent = numeric_rank(delta) < 2;

    if (m == 2) {
        out.mu = dependence(psi.x()[0], psi.x()[1]);
        out.lambda = dependence(psi.y()[0], psi.y()[1]);
        const bool b_present = numeric_rank(b) > 0;
        const bool d_present = numeric_rank(delta) > 0;
        out.label = b_present ? (d_present ? 'd' : 'c') : (d_present ? 'b' : 'a');
    } else {
        out.mu = dependence(b[0], b[1]);
        out.lambda = dependence(delta[0], delta[1]);
        if (!out.delta_dependent) {
            out.label = out.b_dependent ? 'b' : 'a';
        } else {
            out.label = out.b_dependent ? 'd' : 'c';
        }
    }
    return out;
}

} // namespace ndetect
