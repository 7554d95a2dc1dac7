#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndetect/checker.hpp"
#include "ndetect/families.hpp"
#include "ndetect/interference.hpp"
#include "ndetect/solver.hpp"

namespace ndetect::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Complex scalars are [re, im]; matrices are {"rows", "cols", "entries"} with
// entries in row-major order.
json to_json(Complex z);
json to_json(const ComplexMatrix& m);
json to_json(const BlockState& s);
json to_json(const ProblemInstance& inst);
json to_json(const CheckReport& r);
json to_json(const SearchReport& r);
json to_json(const Dim2Certificate& c);

Complex complex_from_json(const json& j, const std::string& field);
ComplexMatrix matrix_from_json(const json& j, const std::string& field);
BlockState state_from_json(const json& j, const std::string& field = "$");

struct Loaded {
    ProblemInstance instance;
    std::vector<std::string> warnings;
};

/// Parses and validates an instance document. Every failure is a
/// SchemaError naming the offending field. A non-normalized state is
/// normalized with a warning, or rejected when `strict`; a non-Hermitian K
/// is kept with a warning.
Loaded instance_from_json(const json& j, bool strict = false);
Loaded load_instance(const std::filesystem::path& path, bool strict = false);

/// Writes `text` to `path`, throwing Error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v); ///< 17 significant digits

struct ScreenRow {
    int bin;
    double p_quantum, p_classical, cross_term, p_selected_Y, p_selected_T;
};

void write_screen_csv(std::ostream& os, const std::vector<ScreenRow>& rows);

/// Columns cavity, bin, probability, count (count omitted from rows only
/// when no sample is given, written as 0).
void write_joint_csv(std::ostream& os, const JointTable& table, const SampleResult* sample);

} // namespace ndetect::io
