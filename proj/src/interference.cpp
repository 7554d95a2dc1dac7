#include "ndetect/interference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "ndetect/errors.hpp"

namespace ndetect {

namespace {

int dim2_of(const BlockState& psi, const ScreenModel& screen) {
    if (psi.layout().dim1() != screen.dim1) {
        throw DimensionError("screen dimension " + std::to_string(screen.dim1) +
                             " does not match the state's dim1 " + std::to_string(psi.layout().dim1()));
    }
    return psi.decomp().dim2();
}

void require_commutes_with_screen(const ComplexMatrix& Z, const ScreenModel& screen, int dim2, double tol) {
    if (Z.rows() != screen.dim1 * dim2 || Z.cols() != Z.rows()) {
        throw DimensionError("selection operator does not match the state dimension");
    }
    for (int b = 0; b < screen.n_bins(); ++b) {
        const double c = commutator(Z, screen_projector(screen, b, dim2)).norm();
        if (c > tol) {
            throw NonCommuting("selection operator does not commute with F(Delta) for bin " + std::to_string(b) +
                               " (residual " + std::to_string(c) + ")");
        }
    }
}

SplitState checked_split(const BlockState& psi, const ComplexMatrix& E) {
    SplitState s = split_state(psi.vector(), E);
    if (!(s.pi1 > 1e-12 && s.pi2 > 1e-12)) {
        throw DegenerateState("which-slit split is degenerate (pi(1) = " + std::to_string(s.pi1) + ")");
    }
    return s;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

SplitState split_state(const ComplexVector& psi, const ComplexMatrix& E) {
    if (E.rows() != psi.size() || E.cols() != psi.size()) {
        throw DimensionError("which-slit operator does not match the state dimension");
    }
    SplitState s;
    s.psi1 = E * psi;
    s.psi2 = psi - s.psi1;
    s.pi1 = s.psi1.squaredNorm();
    s.pi2 = s.psi2.squaredNorm();
    return s;
}

ComplexMatrix screen_projector(const ScreenModel& screen, int bin, int dim2) {
    return tensor_product(screen.J.at(bin), identity(dim2));
}

Distribution screen_distribution(const BlockState& psi, const ScreenModel& screen) {
    const int dim2 = dim2_of(psi, screen);
    const ComplexVector v = psi.vector();
    Distribution out;
    for (const auto& j : screen.J) out.push_back(v.dot(apply_h1(j, v, dim2)).real());
    return out;
}

Distribution classical_distribution(const BlockState& psi, const ComplexMatrix& E, const ScreenModel& screen) {
    const int dim2 = dim2_of(psi, screen);
    const SplitState s = checked_split(psi, E);
    Distribution out;
    for (const auto& j : screen.J) {
        out.push_back(s.psi1.dot(apply_h1(j, s.psi1, dim2)).real() + s.psi2.dot(apply_h1(j, s.psi2, dim2)).real());
    }
    return out;
}

Distribution interference_term(const BlockState& psi, const ComplexMatrix& E, const ScreenModel& screen,
                               const std::optional<ComplexMatrix>& Z, double tol) {
    const int dim2 = dim2_of(psi, screen);
    if (Z) require_commutes_with_screen(*Z, screen, dim2, tol);
    const SplitState s = split_state(psi.vector(), E);
    const ComplexVector left = Z ? ComplexVector(Z->adjoint() * s.psi1) : s.psi1;
    Distribution out;
    for (const auto& j : screen.J) out.push_back(2.0 * left.dot(apply_h1(j, s.psi2, dim2)).real());
    return out;
}

std::pair<Distribution, Distribution> conditional_screen(const BlockState& psi, const ComplexMatrix& E,
                                                         const ScreenModel& screen) {
    const int dim2 = dim2_of(psi, screen);
    const SplitState s = checked_split(psi, E);
    Distribution p1, p2;
    for (const auto& j : screen.J) {
        p1.push_back(s.psi1.dot(apply_h1(j, s.psi1, dim2)).real() / s.pi1);
        p2.push_back(s.psi2.dot(apply_h1(j, s.psi2, dim2)).real() / s.pi2);
    }
    return {p1, p2};
}

Distribution selected_distribution(const BlockState& psi, const ComplexMatrix& Z, const ScreenModel& screen,
                                   double tol) {
    const int dim2 = dim2_of(psi, screen);
    require_commutes_with_screen(Z, screen, dim2, tol);
    const ComplexVector v = psi.vector();
    const ComplexVector zv = Z.adjoint() * v;
    Distribution out;
    for (const auto& j : screen.J) out.push_back(zv.dot(apply_h1(j, v, dim2)).real());
    return out;
}

std::array<double, 4> JointTable::cavity_marginal() const {
    std::array<double, 4> m{};
    for (int c = 0; c < 4; ++c) {
        for (double v : p[c]) m[c] += v;
    }
    return m;
}

Distribution JointTable::screen_marginal() const {
    Distribution m(p[0].size(), 0.0);
    for (const auto& row : p) {
        for (std::size_t b = 0; b < row.size(); ++b) m[b] += row[b];
    }
    return m;
}

JointTable joint_outcome_distribution(const ProblemInstance& instance, const ScreenModel& screen) {
    const int dim2 = dim2_of(instance.psi, screen);
    const ComplexVector v = instance.psi.vector();
    JointTable t;
    for (Cavity c : kCavities) {
        const ComplexVector pv = apply_h2(instance.decomp.projector(c), v, dim2);
        auto& row = t.p[static_cast<int>(c)];
        for (const auto& j : screen.J) {
            // Pi_c and J act on different factors, so the product is a projector.
            row.push_back(std::max(0.0, pv.dot(apply_h1(j, pv, dim2)).real()));
        }
    }
    return t;
}

std::array<double, 4> SampleResult::cavity_frequencies() const {
    std::array<double, 4> f{};
    for (int c = 0; c < 4; ++c) {
        std::uint64_t s = 0;
        for (auto k : counts[c]) s += k;
        f[c] = n ? static_cast<double>(s) / static_cast<double>(n) : 0.0;
    }
    return f;
}

SampleResult sample_runs(const JointTable& table, const std::array<Inference, 4>& inference, std::uint64_t n,
                         std::uint64_t seed, int workers, bool keep_draws) {
    if (n < 1) throw ParameterRange("sample count must be >= 1");
    if (workers < 1) throw ParameterRange("worker count must be >= 1");
    const int bins = table.n_bins();
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& row : table.p) {
        for (double v : row) {
            acc += v;
            cdf.push_back(acc);
        }
    }
    if (!(acc > 0.0)) throw DegenerateState("joint table has zero total probability");
    for (double& c : cdf) c /= acc;
    cdf.back() = 1.0;

    const std::uint64_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    std::vector<std::vector<std::uint64_t>> block_counts(blocks, std::vector<std::uint64_t>(cdf.size(), 0));
    std::vector<std::vector<std::uint32_t>> block_cells(keep_draws ? blocks : 0);

    auto run_block = [&](std::uint64_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        std::mt19937_64 rng(seq);
        const std::uint64_t count = std::min(kSampleBlock, n - b * kSampleBlock);
        auto& local = block_counts[b];
        for (std::uint64_t i = 0; i < count; ++i) {
            const double u = uniform01(rng);
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            if (it == cdf.end()) --it;
            // upper_bound never lands on a zero-width cell
            const auto cell = static_cast<std::uint32_t>(it - cdf.begin());
            ++local[cell];
            if (keep_draws) block_cells[b].push_back(cell);
        }
    };
    const auto nworkers = static_cast<std::uint64_t>(std::min<std::uint64_t>(workers, blocks));
    if (nworkers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::jthread> pool;
        for (std::uint64_t w = 0; w < nworkers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = w; b < blocks; b += nworkers) run_block(b);
            });
        }
    }

    SampleResult out;
    out.n = n;
    for (auto& row : out.counts) row.assign(bins, 0);
    for (const auto& local : block_counts) {
        for (std::size_t cell = 0; cell < local.size(); ++cell) {
            out.counts[cell / bins][cell % bins] += local[cell];
        }
    }
    for (int c = 0; c < 4; ++c) {
        std::uint64_t s = 0;
        for (auto k : out.counts[c]) s += k;
        out.label_counts[c] = s;
    }
    if (keep_draws) {
        for (const auto& cells : block_cells) {
            for (auto cell : cells) {
                const auto cav = static_cast<Cavity>(cell / bins);
                out.draws.push_back(Draw{cav, static_cast<int>(cell % bins), inference[cell / bins]});
            }
        }
    }
    return out;
}

ChiSquare chi_square(const SampleResult& sample, const JointTable& table) {
    ChiSquare out;
    int cells = 0;
    const double n = static_cast<double>(sample.n);
    for (int c = 0; c < 4; ++c) {
        for (int b = 0; b < table.n_bins(); ++b) {
            const double p = table.p[c][b];
            const double k = static_cast<double>(sample.counts[c][b]);
            if (p <= 1e-15) {
                if (k > 0) out.impossible_cell_hit = true;
                continue;
            }
            const double e = n * p;
            out.statistic += (k - e) * (k - e) / e;
            ++cells;
        }
    }
    out.dof = cells - 1;
    out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 1.0;
    if (out.impossible_cell_hit) out.p_value = 0.0;
    return out;
}

} // namespace ndetect
