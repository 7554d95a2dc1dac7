#include "ndetect/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ndetect/errors.hpp"

namespace ndetect::io {

namespace {

const json& require(const json& j, const char* key, const std::string& field) {
    if (!j.is_object()) throw SchemaError(field, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(field + "." + key, "missing");
    return *it;
}

int require_int(const json& j, const char* key, const std::string& field, int min_value) {
    const json& v = require(j, key, field);
    if (!v.is_number_integer()) throw SchemaError(field + "." + key, "expected an integer");
    const auto i = v.get<long long>();
    if (i < min_value || i > 1 << 20) {
        throw SchemaError(field + "." + key, "must be >= " + std::to_string(min_value));
    }
    return static_cast<int>(i);
}

std::vector<ComplexVector> components_from_json(const json& j, const std::string& field, int count, int dim2) {
    if (!j.is_array() || static_cast<int>(j.size()) != count) {
        throw SchemaError(field, "expected an array of " + std::to_string(count) + " component vectors");
    }
    std::vector<ComplexVector> out;
    for (int i = 0; i < count; ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        const json& v = j[i];
        if (!v.is_array() || static_cast<int>(v.size()) != dim2) {
            throw SchemaError(f, "expected " + std::to_string(dim2) + " complex entries");
        }
        ComplexVector c(dim2);
        for (int k = 0; k < dim2; ++k) c(k) = complex_from_json(v[k], f + "[" + std::to_string(k) + "]");
        out.push_back(std::move(c));
    }
    return out;
}

json components_to_json(const std::vector<ComplexVector>& v) {
    json arr = json::array();
    for (const auto& c : v) {
        json row = json::array();
        for (Eigen::Index k = 0; k < c.size(); ++k) row.push_back(to_json(c(k)));
        arr.push_back(std::move(row));
    }
    return arr;
}

json condition_json(const ConditionResult& c) { return json{{"pass", c.pass}, {"residual", c.residual}}; }

} // namespace

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(to_json(m(i, j)));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

json to_json(const BlockState& s) {
    const auto& d = s.decomp();
    return json{{"layout", {{"m", s.layout().m()}}},
                {"decomp",
                 {{"rA", d.rank(Cavity::A)}, {"rB", d.rank(Cavity::B)}, {"rC", d.rank(Cavity::C)},
                  {"rD", d.rank(Cavity::D)}}},
                {"x", components_to_json(s.x())},
                {"y", components_to_json(s.y())}};
}

json to_json(const ProblemInstance& inst) {
    json j = to_json(inst.psi);
    j["schema_version"] = kSchemaVersion;
    j["family"] = inst.family;
    j["params"] = json::object();
    for (const auto& [k, v] : inst.params) j["params"][k] = v;
    if (inst.K) j["K"] = to_json(*inst.K);
    return j;
}

json to_json(const CheckReport& r) {
    json j;
    for (int i = 1; i <= 5; ++i) j["C" + std::to_string(i)] = condition_json(r.c(i));
    j["K_projector"] = {{"pass", r.k_projector.is_projector},
                        {"hermitian_residual", r.k_projector.hermitian_residual},
                        {"idempotent_residual", r.k_projector.idempotent_residual}};
    j["verdict"] = r.verdict;
    return j;
}

json to_json(const SearchReport& r) {
    const auto& o = r.options;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["options"] = {{"restarts", o.restarts},
                    {"max_iterations", o.max_iterations},
                    {"tolerance", o.tolerance},
                    {"rank_target", o.rank_target ? json(*o.rank_target) : json(nullptr)},
                    {"dedup_distance", o.dedup_distance},
                    {"seed", o.seed},
                    {"start_scale", o.start_scale}};
    j["rejection"] = r.rejection ? json(*r.rejection) : json(nullptr);
    j["subspace_dimension"] = r.subspace_dimension;
    j["constraint_residual"] = r.constraint_residual;
    j["best_residual"] = r.best_residual;
    json restarts = json::array();
    for (const auto& t : r.search.restarts) {
        restarts.push_back({{"sub_seed", t.sub_seed},
                            {"iterations", t.best_residuals.size()},
                            {"final_residual", t.best_residuals.empty() ? 0.0 : t.best_residuals.back()},
                            {"idempotent_residual", t.idempotent_residual},
                            {"converged", t.converged}});
    }
    j["restarts"] = std::move(restarts);
    json sols = json::array();
    for (const auto& inst : r.instances) sols.push_back(to_json(*inst.K));
    j["solutions"] = std::move(sols);
    return j;
}

json to_json(const Dim2Certificate& c) {
    return json{{"schema_version", kSchemaVersion},
                {"exact_infeasible", c.exact_infeasible},
                {"kernel_dimension", c.kernel_dimension},
                {"derivation", c.derivation},
                {"trials", c.trials},
                {"solutions_found", c.solutions_found},
                {"rejected_degenerate", c.rejected_degenerate},
                {"best_residual", c.best_residual}};
}

Complex complex_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SchemaError(field, "expected a complex scalar [re, im]");
    }
    const Complex z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SchemaError(field, "non-finite value");
    return z;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& field) {
    const int rows = require_int(j, "rows", field, 1);
    const int cols = require_int(j, "cols", field, 1);
    if (rows > kMaxDimension || cols > kMaxDimension) throw SchemaError(field, "exceeds the maximum dimension");
    const json& e = require(j, "entries", field);
    if (!e.is_array() || e.size() != static_cast<std::size_t>(rows) * cols) {
        throw SchemaError(field + ".entries", "expected rows * cols = " + std::to_string(rows * cols) + " entries");
    }
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            const auto idx = static_cast<std::size_t>(i) * cols + k;
            m(i, k) = complex_from_json(e[idx], field + ".entries[" + std::to_string(idx) + "]");
        }
    }
    return m;
}

BlockState state_from_json(const json& j, const std::string& field) {
    const json& lay = require(j, "layout", field);
    const int m = require_int(lay, "m", field + ".layout", 1);
    const json& dec = require(j, "decomp", field);
    const std::string df = field + ".decomp";
    const int rA = require_int(dec, "rA", df, 0), rB = require_int(dec, "rB", df, 0);
    const int rC = require_int(dec, "rC", df, 0), rD = require_int(dec, "rD", df, 0);
    if (rA + rB + rC + rD == 0) throw SchemaError(df, "total dimension must be positive");
    const SlitLayout layout(m);
    const CavityDecomposition decomp(rA, rB, rC, rD);
    auto x = components_from_json(require(j, "x", field), field + ".x", m, decomp.dim2());
    auto y = components_from_json(require(j, "y", field), field + ".y", m, decomp.dim2());
    return BlockState(layout, decomp, std::move(x), std::move(y));
}

Loaded instance_from_json(const json& j, bool strict) {
    if (!j.is_object()) throw SchemaError("$", "expected an object");
    const json& ver = require(j, "schema_version", "$");
    if (!ver.is_number_integer() || ver.get<long long>() != kSchemaVersion) {
        throw SchemaError("$.schema_version", "unknown schema version " + ver.dump() + " (expected " +
                                                  std::to_string(kSchemaVersion) + ")");
    }
    Loaded out{ProblemInstance{SlitLayout(1), CavityDecomposition(1, 0, 0, 0), std::nullopt,
                               BlockState(SlitLayout(1), CavityDecomposition(1, 0, 0, 0),
                                          {ComplexVector::Ones(1)}, {ComplexVector::Zero(1)}),
                               "", {}},
               {}};
    BlockState raw = state_from_json(j, "$");
    const double norm = raw.norm();
    if (norm == 0.0) throw SchemaError("$.x", "state is the zero vector");
    if (std::abs(norm - 1.0) > 1e-10) {
        if (strict) throw SchemaError("$.x", "state is not normalized (norm " + format_double(norm) + ")");
        out.warnings.push_back("state norm " + format_double(norm) + " normalized to 1");
    }
    BlockState psi = BlockState::from_vector(raw.layout(), raw.decomp(), raw.vector() / norm);
    std::optional<ComplexMatrix> K;
    if (j.contains("K")) {
        K = matrix_from_json(j["K"], "$.K");
        if (K->rows() != psi.layout().dim1() || K->cols() != psi.layout().dim1()) {
            throw SchemaError("$.K", "must be dim1 x dim1 = " + std::to_string(psi.layout().dim1()) + " square");
        }
        const double h = (*K - K->adjoint()).norm();
        if (h > 1e-12) out.warnings.push_back("K is not Hermitian (residual " + format_double(h) + ")");
    }
    std::string family;
    if (j.contains("family")) {
        if (!j["family"].is_string()) throw SchemaError("$.family", "expected a string");
        family = j["family"].get<std::string>();
    }
    std::map<std::string, double> params;
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw SchemaError("$.params", "expected an object");
        for (const auto& [k, v] : j["params"].items()) {
            if (!v.is_number()) throw SchemaError("$.params." + k, "expected a number");
            params[k] = v.get<double>();
        }
    }
    out.instance = ProblemInstance{psi.layout(), psi.decomp(), std::move(K), psi, family, params};
    return out;
}

Loaded load_instance(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string(), "cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string(), std::string("parse error: ") + e.what());
    }
    return instance_from_json(j, strict);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_screen_csv(std::ostream& os, const std::vector<ScreenRow>& rows) {
    os << "bin,p_quantum,p_classical,cross_term,p_selected_Y,p_selected_T\n";
    for (const auto& r : rows) {
        os << r.bin << ',' << format_double(r.p_quantum) << ',' << format_double(r.p_classical) << ','
           << format_double(r.cross_term) << ',' << format_double(r.p_selected_Y) << ','
           << format_double(r.p_selected_T) << '\n';
    }
}

void write_joint_csv(std::ostream& os, const JointTable& table, const SampleResult* sample) {
    os << "cavity,bin,probability,count\n";
    for (Cavity c : kCavities) {
        const int ci = static_cast<int>(c);
        for (int b = 0; b < table.n_bins(); ++b) {
            os << cavity_name(c) << ',' << b << ',' << format_double(table.p[ci][b]) << ','
               << (sample ? sample->counts[ci][b] : 0) << '\n';
        }
    }
}

} // namespace ndetect::io
