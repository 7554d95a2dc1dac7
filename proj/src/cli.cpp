#include "ndetect/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ndetect/errors.hpp"
#include "ndetect/families.hpp"
#include "ndetect/interference.hpp"
#include "ndetect/io.hpp"

namespace ndetect::cli {

namespace {

const char* pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

ProblemInstance make_family(const std::string& name, const FamilyParams& fp, std::uint64_t seed) {
    if (name == "dim4_sym") return family_dim4_sym(fp.q, fp.theta);
    if (name == "dim4_mu0") return family_dim4_mu0(fp.lambda, fp.p, fp.theta);
    if (name == "dim4_general") return family_dim4_general(fp.lambda, fp.mu, seed);
    if (name == "dim4_mirror") return mirror_instance(family_dim4_general(fp.lambda, fp.mu, seed));
    if (name == "dim6") return family_dim6(fp.p, fp.theta);
    if (name == "apparatus") return apparatus_instance().instance;
    if (name == "eraser") return eraser_instance().instance();
    throw SchemaError("family", "unknown family '" + name +
                                    "' (dim4_sym, dim4_mu0, dim4_general, dim4_mirror, dim6, apparatus, eraser)");
}

ProblemInstance resolve_instance(const RunConfig& c, std::ostream& err) {
    if (!c.input.empty() && !c.family.empty()) throw SchemaError("input", "give an instance file or --family, not both");
    if (!c.family.empty()) return make_family(c.family, c.params, c.seed);
    if (c.input.empty()) throw SchemaError("input", "an instance file or --family is required");
    auto loaded = io::load_instance(c.input, c.strict);
    for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
    return loaded.instance;
}

void require_out(const RunConfig& c) {
    if (c.out.empty()) throw SchemaError("--out", "required for " + c.command);
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ProblemInstance inst = resolve_instance(c, err);
    if (!inst.K) throw SchemaError("$.K", "verify needs an incompatible property K");
    const CheckReport rep = check_problem(inst, c.tol);
    for (int i = 1; i <= 5; ++i) {
        out << 'C' << i << ' ' << pass_fail(rep.c(i).pass) << " residual=" << io::format_double(rep.c(i).residual)
            << '\n';
    }
    out << "K projector " << pass_fail(rep.k_projector.is_projector)
        << " hermitian=" << io::format_double(rep.k_projector.hermitian_residual)
        << " idempotent=" << io::format_double(rep.k_projector.idempotent_residual) << '\n';
    out << "verdict " << pass_fail(rep.verdict) << '\n';
    if (!c.out.empty()) io::write_file(c.out, io::to_json(rep).dump(2) + "\n");
    return rep.verdict ? kOk : kDomainFailure;
}

int cmd_family(const RunConfig& c, std::ostream& out, std::ostream&) {
    if (c.family.empty()) throw SchemaError("family", "a family name is required");
    require_out(c);
    const ProblemInstance inst = make_family(c.family, c.params, c.seed);
    io::write_file(c.out, io::to_json(inst).dump(2) + "\n");
    out << "wrote " << inst.family << " instance (dim1 " << inst.layout.dim1() << ", dim2 " << inst.decomp.dim2()
        << ") to " << c.out << '\n';
    return kOk;
}

int cmd_search(const RunConfig& c, std::ostream& out, std::ostream& err) {
    SolverOptions opts;
    opts.seed = c.seed;
    opts.restarts = c.restarts;
    opts.rank_target = c.rank;
    opts.tolerance = c.tol.idempotent;
    opts.validate();
    if (c.input.empty()) {
        if (c.dim1 != 2) throw SchemaError("--dim1", "random-state search is defined for dim1 = 2 only");
        const Dim2Certificate cert = dim2_infeasibility(c.trials, c.seed, opts);
        out << "exact branch " << (cert.exact_infeasible ? "infeasible" : "feasible") << " (kernel dimension "
            << cert.kernel_dimension << ")\n";
        out << "trials " << cert.trials << " solutions " << cert.solutions_found << " rejected_degenerate "
            << cert.rejected_degenerate << " best_residual " << io::format_double(cert.best_residual) << '\n';
        if (!c.out.empty()) io::write_file(c.out, io::to_json(cert).dump(2) + "\n");
        return c.require_solution && cert.solutions_found == 0 ? kDomainFailure : kOk;
    }
    auto loaded = io::load_instance(c.input, c.strict);
    for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
    const SearchReport rep = search_solutions(loaded.instance.psi, opts, c.tol);
    if (rep.rejection) out << "rejected: " << *rep.rejection << '\n';
    out << "subspace dimension " << rep.subspace_dimension << " restarts " << rep.search.restarts.size()
        << " solutions " << rep.instances.size() << " best_residual " << io::format_double(rep.best_residual)
        << '\n';
    if (!c.out.empty()) io::write_file(c.out, io::to_json(rep).dump(2) + "\n");
    return c.require_solution && rep.instances.empty() ? kDomainFailure : kOk;
}

std::optional<ComplexMatrix> selection(const std::string& name, const ProblemInstance& inst) {
    const LiftedOperators ops = lift_operators(inst.layout, inst.decomp, inst.K);
    if (name == "identity") return std::nullopt;
    if (name == "T") return ops.T;
    if (name == "Y") return ops.Y;
    if (name == "TY") return ComplexMatrix(ops.T * ops.Y);
    if (name == "Tplus") {
        const int d2 = inst.decomp.dim2();
        const ComplexVector plus = ComplexVector::Ones(d2);
        return tensor_product(identity(inst.layout.dim1()), ket_bra(plus));
    }
    throw SchemaError("--select", "unknown selection '" + name + "' (identity, T, Y, TY, Tplus)");
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require_out(c);
    const ProblemInstance inst = resolve_instance(c, err);
    const auto Z = selection(c.select, inst);
    const ScreenModel screen = build_screen(inst.layout.dim1(), c.screen, c.bins);
    const LiftedOperators ops = lift_operators(inst.layout, inst.decomp, inst.K);
    const auto pq = screen_distribution(inst.psi, screen);
    const auto pc = classical_distribution(inst.psi, ops.E, screen);
    const auto cross = interference_term(inst.psi, ops.E, screen, Z, c.tol.equality);
    const auto py = selected_distribution(inst.psi, ops.Y, screen, c.tol.equality);
    const auto pt = selected_distribution(inst.psi, ops.T, screen, c.tol.equality);
    std::vector<io::ScreenRow> rows;
    double max_cross = 0.0;
    for (int b = 0; b < screen.n_bins(); ++b) {
        rows.push_back({b, pq[b], pc[b], cross[b], py[b], pt[b]});
        max_cross = std::max(max_cross, std::abs(cross[b]));
    }
    std::ostringstream csv;
    io::write_screen_csv(csv, rows);
    io::write_file(c.out, csv.str());
    out << "bins " << screen.n_bins() << " selection " << c.select << " max_abs_cross_term "
        << io::format_double(max_cross) << '\n';
    return kOk;
}

int cmd_sample(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require_out(c);
    const ProblemInstance inst = resolve_instance(c, err);
    const ScreenModel screen = build_screen(inst.layout.dim1(), c.screen, c.bins);
    const JointTable table = joint_outcome_distribution(inst, screen);
    const std::array<Inference, 4> inference{Inference{1, true}, Inference{1, false}, Inference{2, true},
                                             Inference{2, false}};
    const SampleResult s = sample_runs(table, inference, c.n, c.seed, c.workers);
    const ChiSquare chi = chi_square(s, table);
    std::ostringstream csv;
    io::write_joint_csv(csv, table, &s);
    io::write_file(c.out, csv.str());
    const auto f = s.cavity_frequencies();
    const auto exact = table.cavity_marginal();
    out << "n " << s.n << " seed " << c.seed << '\n';
    for (Cavity cav : kCavities) {
        const int i = static_cast<int>(cav);
        const auto& inf = inference[i];
        out << cavity_name(cav) << " slit " << inf.slit << (inf.has_g ? " G " : " G' ") << "frequency "
            << io::format_double(f[i]) << " exact " << io::format_double(exact[i]) << '\n';
    }
    out << "chi_square " << io::format_double(chi.statistic) << " dof " << chi.dof << " p_value "
        << io::format_double(chi.p_value) << '\n';
    return kOk;
}

int cmd_screen_check(const RunConfig& c, std::ostream& out, std::ostream&) {
    if (c.dim1 < 2 || c.dim1 % 2 != 0) throw SchemaError("--dim1", "must be an even integer >= 2");
    const ScreenModel unchecked = build_screen_unchecked(c.dim1, c.screen, c.bins);
    const double vis = max_cross_term(unchecked);
    out << "screen " << screen_kind_name(c.screen) << " dim1 " << c.dim1 << " bins " << unchecked.n_bins()
        << " max_cross_term " << io::format_double(vis) << '\n';
    if (!c.out.empty()) {
        std::ostringstream csv;
        csv << "bin,cross_e1_r1\n";
        const int m = c.dim1 / 2;
        for (int b = 0; b < unchecked.n_bins(); ++b) {
            csv << b << ',' << io::format_double(unchecked.J[b](0, m).real()) << '\n';
        }
        io::write_file(c.out, csv.str());
    }
    build_screen(c.dim1, c.screen, c.bins);
    out << "screen valid\n";
    return kOk;
}

bool is_input_error(const std::exception& e) {
    return dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
           dynamic_cast<const ParameterRange*>(&e);
}

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "verify") return cmd_verify(config, out, err);
        if (config.command == "family") return cmd_family(config, out, err);
        if (config.command == "search") return cmd_search(config, out, err);
        if (config.command == "simulate") return cmd_simulate(config, out, err);
        if (config.command == "sample") return cmd_sample(config, out, err);
        if (config.command == "screen-check") return cmd_screen_check(config, out, err);
        err << "error: unknown command '" << config.command << "'\n";
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_input_error(e) ? kInputError : kDomainFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
}

int main(int argc, char** argv) {
    RunConfig c;
    if (const char* env = std::getenv("NDETECT_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(t > 0.0)) {
            std::cerr << "error: NDETECT_TOL must be a positive number\n";
            return kInputError;
        }
        c.tol.equality = c.tol.idempotent = t;
    }

    CLI::App app{"Non-disturbing which-slit detection: verifier, solver and simulator"};
    app.set_version_flag("--version", std::string("ndetect ") + NDETECT_VERSION + " schema " +
                                          std::to_string(io::kSchemaVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<double> tol;
    std::string screen = "dft";
    double lambda_re = 1.0, lambda_im = 0.0, mu_re = 1.0, mu_im = 0.0;
    app.add_option("--tol", tol, "Equality and idempotence tolerance (overrides NDETECT_TOL)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--screen", screen, "Screen propagator")->check(CLI::IsMember({"dft", "identity"}));
    app.add_option("--bins", c.bins, "Number of screen bins (0 = singletons)")->check(CLI::NonNegativeNumber);
    app.add_flag("--strict", c.strict, "Reject non-normalized states instead of normalizing");
    app.add_option("--out", c.out, "Output artifact path");
    app.add_option("--q", c.params.q, "Family parameter q");
    app.add_option("--p", c.params.p, "Family parameter p");
    app.add_option("--theta", c.params.theta, "Family phase theta");
    app.add_option("--lambda-re", lambda_re);
    app.add_option("--lambda-im", lambda_im);
    app.add_option("--mu-re", mu_re);
    app.add_option("--mu-im", mu_im);

    auto* verify = app.add_subcommand("verify", "Check an instance against C1-C5");
    verify->add_option("input", c.input, "Instance JSON")->required();

    auto* family = app.add_subcommand("family", "Write a closed-form instance");
    family->add_option("name", c.family, "Family name")->required();

    auto* search = app.add_subcommand("search", "Search for incompatible properties");
    search->add_option("input", c.input, "State or instance JSON");
    search->add_option("--dim1", c.dim1, "Random-state mode at this H1 dimension");
    search->add_option("--trials", c.trials, "Random states in dim1 mode")->check(CLI::PositiveNumber);
    search->add_option("--restarts", c.restarts, "Solver restarts")->check(CLI::PositiveNumber);
    search->add_option("--rank", c.rank, "Rank target for K");
    search->add_flag("--require-solution", c.require_solution, "Exit 1 when nothing is found");

    auto* simulate = app.add_subcommand("simulate", "Screen distributions as CSV");
    simulate->add_option("input", c.input, "Instance JSON");
    simulate->add_option("--family", c.family, "Use a named family instead of a file");
    simulate->add_option("--select", c.select, "Selection operator Z")
        ->check(CLI::IsMember({"identity", "T", "Y", "TY", "Tplus"}));

    auto* sample = app.add_subcommand("sample", "Monte Carlo runs of the apparatus");
    sample->add_option("input", c.input, "Instance JSON");
    sample->add_option("--family", c.family, "Use a named family instead of a file");
    sample->add_option("--n", c.n, "Number of runs")->check(CLI::PositiveNumber);
    sample->add_option("--workers", c.workers, "Sampling threads")->check(CLI::PositiveNumber);

    auto* screen_check = app.add_subcommand("screen-check", "Validate a screen model");
    screen_check->add_option("--dim1", c.dim1, "H1 dimension")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }
    c.command = app.get_subcommands().front()->get_name();
    if (tol) c.tol.equality = c.tol.idempotent = *tol;
    c.screen = parse_screen_kind(screen);
    c.params.lambda = Complex(lambda_re, lambda_im);
    c.params.mu = Complex(mu_re, mu_im);
    return run(c, std::cout, std::cerr);
}

} // namespace ndetect::cli
