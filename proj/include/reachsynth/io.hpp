#pragma once

// File formats: JSON models and zonotopes, CSV traces with JSON sidecars, lab
// suites and configuration objects.

#include "reachsynth/robotlab.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace reachsynth {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const Mat& m);  // row-major array of rows
Json to_json(const Vec& v);
Json to_json(const Interval& box);
/// Non-finite values become null.
Json number(double x);
Mat mat_from_json(const Json& j, Index rows = -1, Index cols = -1);
Vec vec_from_json(const Json& j);

/// {center, generators}; generators are the effective columns G' diag(alpha).
Json zonotope_to_json(const Zonotope& z);
Zonotope zonotope_from_json(const Json& j);

/// {A..F, W, V, timing, w_labels, v_labels}; timing is "continuous" or {"discrete": dt}.
Json model_to_json(const LtiSystem& sys);
LtiSystem model_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Columns k, u_1..u_m, y_1..y_q with one header row.
void write_trace_csv(const std::filesystem::path& path, const Mat& inputs, const Mat& outputs);

struct Trace {
  Mat inputs;
  Mat outputs;
};
Trace read_trace_csv(const std::filesystem::path& path);

/// Generic numeric CSV with a leading k column and the given column names.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& names, const Mat& rows);
Mat read_table_csv(const std::filesystem::path& path, std::vector<std::string>* names = nullptr);

// A suite directory holds suite.json, case_NNNN.csv traces and case_NNNN.json
// sidecars with the initial state. Optional case_NNNN.states.csv carries the
// state at every step; lab suites store the lab snapshot there instead.

void write_suite(const std::filesystem::path& dir, const TestSuite& suite);
TestSuite read_suite(const std::filesystem::path& dir);

void write_lab_suite(const std::filesystem::path& dir, const LabSuite& lab);
LabSuite read_lab_suite(const std::filesystem::path& dir);

/// "lab" or "generic", from suite.json.
std::string suite_kind(const std::filesystem::path& dir);

Json to_json(const LabConfig& c);
/// Fields present in j override `base`.
LabConfig lab_config_from_json(const Json& j, LabConfig base = {});
Json to_json(const ReferenceConfig& c);
ReferenceConfig reference_config_from_json(const Json& j, ReferenceConfig base = {});

}  // namespace reachsynth
