#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ndetect/errors.hpp"
#include "ndetect/families.hpp"
#include "ndetect/interference.hpp"
#include "ndetect/io.hpp"

namespace py = pybind11;
using namespace ndetect;

namespace {

CavityDecomposition decomp_of(const std::array<int, 4>& r) { return {r[0], r[1], r[2], r[3]}; }

ProblemInstance make_instance(int m, const std::array<int, 4>& ranks, const ComplexVector& psi,
                              const std::optional<ComplexMatrix>& K) {
    const SlitLayout layout(m);
    const CavityDecomposition d = decomp_of(ranks);
    return {layout, d, K, BlockState::from_vector(layout, d, psi), "", {}};
}

py::dict instance_dict(const ProblemInstance& inst) {
    py::dict out;
    out["family"] = inst.family;
    out["m"] = inst.layout.m();
    out["ranks"] = std::array<int, 4>{inst.decomp.rank(Cavity::A), inst.decomp.rank(Cavity::B),
                                      inst.decomp.rank(Cavity::C), inst.decomp.rank(Cavity::D)};
    out["psi"] = inst.psi.vector();
    out["K"] = inst.K ? py::cast(*inst.K) : py::none();
    out["params"] = inst.params;
    return out;
}

py::dict report_dict(const CheckReport& r) {
    py::dict out;
    for (int i = 1; i <= 5; ++i) {
        out[("C" + std::to_string(i)).c_str()] = py::make_tuple(r.c(i).pass, r.c(i).residual);
    }
    out["K_projector"] = r.k_projector.is_projector;
    out["verdict"] = r.verdict;
    return out;
}

} // namespace

PYBIND11_MODULE(ndetect, m) {
    m.doc() = "Non-disturbing which-slit detection: verifier, solver and simulator";
    m.attr("__version__") = NDETECT_VERSION;
    m.attr("schema_version") = io::kSchemaVersion;

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("is_projector", [](const ComplexMatrix& k, double tol) {
        const auto r = is_projector(k, tol);
        return py::make_tuple(r.is_projector, r.hermitian_residual, r.idempotent_residual);
    }, py::arg("matrix"), py::arg("tol") = 1e-10);
    m.def("projector_rank", [](const ComplexMatrix& k) { return projector_rank(k); });
    m.def("tensor_product", &tensor_product);

    m.def("family", [](const std::string& name, double q, double p, double theta, Complex lambda, Complex mu,
                       std::uint64_t seed) {
        ProblemInstance inst = [&]() -> ProblemInstance {
            if (name == "dim4_sym") return family_dim4_sym(q, theta);
            if (name == "dim4_mu0") return family_dim4_mu0(lambda, p, theta);
            if (name == "dim4_general") return family_dim4_general(lambda, mu, seed);
            if (name == "dim6") return family_dim6(p, theta);
            if (name == "apparatus") return apparatus_instance().instance;
            if (name == "eraser") return eraser_instance().instance();
            throw py::value_error("unknown family '" + name + "'");
        }();
        return instance_dict(inst);
    }, py::arg("name"), py::arg("q") = 0.25, py::arg("p") = 0.25, py::arg("theta") = 0.0,
       py::arg("lambda_") = Complex(1.0), py::arg("mu") = Complex(1.0), py::arg("seed") = 0);

    m.def("check", [](const ComplexMatrix& K, const ComplexVector& psi, int slits,
                      const std::array<int, 4>& ranks) {
        return report_dict(check_problem(make_instance(slits, ranks, psi, K)));
    }, py::arg("K"), py::arg("psi"), py::arg("m"), py::arg("ranks"));

    m.def("verify_file", [](const std::string& path, bool strict) {
        const auto loaded = io::load_instance(path, strict);
        py::dict out = report_dict(check_problem(loaded.instance));
        out["warnings"] = loaded.warnings;
        return out;
    }, py::arg("path"), py::arg("strict") = false);

    m.def("search", [](const ComplexVector& psi, int slits, const std::array<int, 4>& ranks,
                       std::optional<int> rank, int restarts, std::uint64_t seed) {
        SolverOptions opts;
        opts.rank_target = rank;
        opts.restarts = restarts;
        opts.seed = seed;
        const SearchReport rep = search_solutions(make_instance(slits, ranks, psi, std::nullopt).psi, opts);
        std::vector<ComplexMatrix> found;
        for (const auto& inst : rep.instances) found.push_back(*inst.K);
        return py::make_tuple(found, rep.best_residual);
    }, py::arg("psi"), py::arg("m"), py::arg("ranks"), py::arg("rank") = std::nullopt, py::arg("restarts") = 32,
       py::arg("seed") = 0);

    m.def("dim2_infeasibility", [](int trials, std::uint64_t seed) {
        const Dim2Certificate c = dim2_infeasibility(trials, seed);
        py::dict out;
        out["exact_infeasible"] = c.exact_infeasible;
        out["solutions_found"] = c.solutions_found;
        out["best_residual"] = c.best_residual;
        return out;
    }, py::arg("trials"), py::arg("seed"));

    m.def("screen_distributions", [](const ComplexVector& psi, int slits, const std::array<int, 4>& ranks,
                                     int bins) {
        const ProblemInstance inst = make_instance(slits, ranks, psi, std::nullopt);
        const ScreenModel screen = build_screen(inst.layout.dim1(), ScreenKind::Dft, bins);
        const auto ops = lift_operators(inst.layout, inst.decomp);
        return py::make_tuple(screen_distribution(inst.psi, screen), classical_distribution(inst.psi, ops.E, screen),
                              interference_term(inst.psi, ops.E, screen));
    }, py::arg("psi"), py::arg("m"), py::arg("ranks"), py::arg("bins") = 0);

    m.def("sample_apparatus", [](std::uint64_t n, std::uint64_t seed, int workers) {
        const ApparatusInstance ap = apparatus_instance();
        const JointTable t = joint_outcome_distribution(ap.instance, build_screen(6));
        const SampleResult r = sample_runs(t, ap.inference, n, seed, workers);
        return py::make_tuple(r.counts, r.cavity_frequencies(), chi_square(r, t).p_value);
    }, py::arg("n"), py::arg("seed"), py::arg("workers") = 1);
}
