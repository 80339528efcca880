#include "reachsynth/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace reachsynth {

namespace fs = std::filesystem;

namespace {

double to_double(const Json& j) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string case_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case_%04zu", i);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec(const Json& j, const char* key, Vec& out) {
  if (j.contains(key)) out = vec_from_json(j.at(key));
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Json to_json(const Interval& box) { return Json{{"lower", to_json(box.lower)}, {"upper", to_json(box.upper)}}; }

Mat mat_from_json(const Json& j, Index rows, Index cols) {
  if (!j.is_array()) throw ConfigError("matrix must be an array of rows");
  const Index r = static_cast<Index>(j.size());
  if (r == 0) return Mat::Zero(std::max<Index>(rows, 0), std::max<Index>(cols, 0));
  const Index c = static_cast<Index>(j[0].size());
  Mat m(r, c);
  for (Index i = 0; i < r; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) throw ConfigError("matrix rows differ in length");
    for (Index k = 0; k < c; ++k) m(i, k) = to_double(row[static_cast<std::size_t>(k)]);
  }
  if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols && c != 0))
    throw ConfigError("matrix has shape " + std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  if (c == 0 && cols > 0) return Mat::Zero(r, cols);
  return m;
}

Vec vec_from_json(const Json& j) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError("vector must be an array");
  Vec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = to_double(j[static_cast<std::size_t>(i)]);
  return v;
}

Json zonotope_to_json(const Zonotope& z) {
  const Mat g = z.generators();
  Json cols = Json::array();
  for (Index h = 0; h < g.cols(); ++h) cols.push_back(to_json(Vec(g.col(h))));
  return Json{{"center", to_json(z.center())}, {"generators", cols}};
}

Zonotope zonotope_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("center")) throw ConfigError("zonotope needs a center");
  const Vec c = vec_from_json(j.at("center"));
  Mat g(c.size(), 0);
  if (j.contains("generators")) {
    const Json& cols = j.at("generators");
    if (!cols.is_array()) throw ConfigError("zonotope generators must be an array of columns");
    g.resize(c.size(), static_cast<Index>(cols.size()));
    for (Index h = 0; h < g.cols(); ++h) {
      const Vec col = vec_from_json(cols[static_cast<std::size_t>(h)]);
      if (col.size() != c.size()) throw ConfigError("zonotope generator length differs from the center");
      g.col(h) = col;
    }
  }
  return Zonotope(c, g);
}

Json model_to_json(const LtiSystem& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["A"] = to_json(s.A);
  j["B"] = to_json(s.B);
  j["C"] = to_json(s.C);
  j["D"] = to_json(s.D);
  j["E"] = to_json(s.E);
  j["F"] = to_json(s.F);
  j["W"] = zonotope_to_json(s.W);
  j["V"] = zonotope_to_json(s.V);
  if (s.sample_time)
    j["timing"] = Json{{"discrete", *s.sample_time}};
  else
    j["timing"] = "continuous";
  if (!s.w_labels.empty()) j["w_labels"] = s.w_labels;
  if (!s.v_labels.empty()) j["v_labels"] = s.v_labels;
  return j;
}

LtiSystem model_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  for (const char* k : {"A", "B", "C"})
    if (!j.contains(k)) throw ConfigError(std::string("model is missing ") + k);
  const Mat a = mat_from_json(j.at("A"));
  const Index n = a.rows();
  const Mat b = mat_from_json(j.at("B"), n);
  const Mat c = mat_from_json(j.at("C"), -1, n);
  const Index m = b.cols(), q = c.rows();
  const Mat d = j.contains("D") ? mat_from_json(j.at("D"), q, m) : Mat::Zero(q, m);
  const Zonotope w = j.contains("W") ? zonotope_from_json(j.at("W")) : Zonotope(Vec::Zero(0));
  const Zonotope v = j.contains("V") ? zonotope_from_json(j.at("V")) : Zonotope(Vec::Zero(0));
  const Mat e = j.contains("E") ? mat_from_json(j.at("E"), n, w.dim()) : Mat::Zero(n, w.dim());
  const Mat f = j.contains("F") ? mat_from_json(j.at("F"), q, v.dim()) : Mat::Zero(q, v.dim());

  std::optional<double> dt;
  if (j.contains("timing")) {
    const Json& t = j.at("timing");
    if (t.is_object() && t.contains("discrete"))
      dt = t.at("discrete").get<double>();
    else if (!(t.is_string() && t.get<std::string>() == "continuous"))
      throw ConfigError("timing must be \"continuous\" or {\"discrete\": dt}");
  }
  LtiSystem s(a, b, c, d, e, f, w, v, dt);
  read_field(j, "w_labels", s.w_labels);
  read_field(j, "v_labels", s.v_labels);
  try {
    s.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("invalid model: ") + ex.what());
  }
  return s;
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_table_csv(const fs::path& path, const std::vector<std::string>& names, const Mat& rows) {
  require_dims(static_cast<Index>(names.size()) == rows.cols(), "write_table_csv: one name per column");
  std::string s = "k";
  for (const auto& n : names) s += "," + n;
  s += "\n";
  for (Index k = 0; k < rows.rows(); ++k) {
    s += std::to_string(k);
    for (Index c = 0; c < rows.cols(); ++c) s += "," + fmt(rows(k, c));
    s += "\n";
  }
  write_text_file(path, s);
}

Mat read_table_csv(const fs::path& path, std::vector<std::string>* names) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": missing header");
  std::vector<std::string> header = split(line);
  if (header.empty() || header[0] != "k") throw ConfigError(path.string() + ": first column must be k");
  header.erase(header.begin());
  std::vector<std::vector<double>> rows;
  Index lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size() + 1)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        row.push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cells[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index c = 0; c < m.cols(); ++c) m(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  if (names) *names = std::move(header);
  return m;
}

void write_trace_csv(const fs::path& path, const Mat& inputs, const Mat& outputs) {
  require_dims(inputs.rows() == outputs.rows(), "write_trace_csv: inputs and outputs differ in length");
  std::vector<std::string> names;
  for (Index i = 0; i < inputs.cols(); ++i) names.push_back("u_" + std::to_string(i + 1));
  for (Index i = 0; i < outputs.cols(); ++i) names.push_back("y_" + std::to_string(i + 1));
  Mat rows(inputs.rows(), inputs.cols() + outputs.cols());
  rows << inputs, outputs;
  write_table_csv(path, names, rows);
}

Trace read_trace_csv(const fs::path& path) {
  std::vector<std::string> names;
  const Mat rows = read_table_csv(path, &names);
  Index m = 0;
  while (m < static_cast<Index>(names.size()) && names[static_cast<std::size_t>(m)].rfind("u_", 0) == 0) ++m;
  for (std::size_t c = static_cast<std::size_t>(m); c < names.size(); ++c)
    if (names[c].rfind("y_", 0) != 0) throw ConfigError(path.string() + ": expected columns u_*, then y_*");
  return {rows.leftCols(m), rows.rightCols(rows.cols() - m)};
}

// ---- suites -----------------------------------------------------------------

namespace {

void write_suite_index(const fs::path& dir, const char* kind, double dt, const Json& cases) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["sample_time"] = dt;
  j["cases"] = cases;
  write_json_file(dir / "suite.json", j);
}

Json read_suite_index(const fs::path& dir) {
  const fs::path p = dir / "suite.json";
  if (!fs::exists(p)) throw ConfigError("no suite at " + dir.string() + " (missing suite.json)");
  Json j = read_json_file(p);
  if (!j.contains("cases") || !j.contains("sample_time")) throw ConfigError(p.string() + ": incomplete suite index");
  return j;
}

std::vector<std::string> numbered(const char* prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

const std::vector<std::string> kLabNames = {"u_prev", "q", "qd", "m_prev", "q_hat", "qd_hat", "xi_1", "xi_2"};

}  // namespace

std::string suite_kind(const fs::path& dir) { return read_suite_index(dir).value("kind", std::string("generic")); }

void write_suite(const fs::path& dir, const TestSuite& suite) {
  fs::create_directories(dir);
  Json cases = Json::array();
  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    const TestCase& c = suite.cases[i];
    const std::string name = case_name(i);
    write_trace_csv(dir / (name + ".csv"), c.inputs, c.outputs);
    Json side{{"x0", to_json(c.initial_state)}};
    if (c.states.rows() > 0) {
      write_table_csv(dir / (name + ".states.csv"), numbered("x_", c.states.cols()), c.states);
      side["states"] = name + ".states.csv";
    }
    write_json_file(dir / (name + ".json"), side);
    cases.push_back(Json{{"trace", name + ".csv"}, {"sidecar", name + ".json"}, {"steps", c.steps()}});
  }
  write_suite_index(dir, "generic", suite.sample_time, cases);
}

TestSuite read_suite(const fs::path& dir) {
  const Json idx = read_suite_index(dir);
  if (idx.value("kind", std::string("generic")) != "generic")
    throw ConfigError(dir.string() + " holds a lab suite; pick a model candidate to read it");
  TestSuite suite;
  suite.sample_time = idx.at("sample_time").get<double>();
  for (const auto& e : idx.at("cases")) {
    TestCase c;
    const Trace t = read_trace_csv(dir / e.at("trace").get<std::string>());
    c.inputs = t.inputs;
    c.outputs = t.outputs;
    const Json side = read_json_file(dir / e.at("sidecar").get<std::string>());
    c.initial_state = vec_from_json(side.at("x0"));
    if (side.contains("states")) c.states = read_table_csv(dir / side.at("states").get<std::string>());
    suite.cases.push_back(std::move(c));
  }
  return suite;
}

void write_lab_suite(const fs::path& dir, const LabSuite& lab) {
  fs::create_directories(dir);
  Json cases = Json::array();
  for (std::size_t i = 0; i < lab.cases.size(); ++i) {
    const LabCase& c = lab.cases[i];
    const std::string name = case_name(i);
    write_trace_csv(dir / (name + ".csv"), c.inputs, c.outputs);
    write_table_csv(dir / (name + ".states.csv"), kLabNames, c.lab_states);
    write_table_csv(dir / (name + ".reference.csv"), {"q_d", "qd_d", "qdd_d"}, c.reference);
    Json side;
    side["x0"] = c.lab_states.rows() > 0 ? to_json(Vec(c.lab_states.row(0).transpose())) : Json::array();
    side["x0_columns"] = kLabNames;
    side["states"] = name + ".states.csv";
    side["reference"] = name + ".reference.csv";
    side["stopped"] = c.stopped;
    write_json_file(dir / (name + ".json"), side);
    cases.push_back(Json{{"trace", name + ".csv"}, {"sidecar", name + ".json"}, {"steps", c.inputs.rows()}});
  }
  write_suite_index(dir, "lab", lab.dt, cases);
}

LabSuite read_lab_suite(const fs::path& dir) {
  const Json idx = read_suite_index(dir);
  if (idx.value("kind", std::string()) != "lab") throw ConfigError(dir.string() + " does not hold a lab suite");
  LabSuite lab;
  lab.dt = idx.at("sample_time").get<double>();
  for (const auto& e : idx.at("cases")) {
    LabCase c;
    const Trace t = read_trace_csv(dir / e.at("trace").get<std::string>());
    c.inputs = t.inputs;
    c.outputs = t.outputs;
    const Json side = read_json_file(dir / e.at("sidecar").get<std::string>());
    c.lab_states = read_table_csv(dir / side.at("states").get<std::string>());
    if (side.contains("reference")) c.reference = read_table_csv(dir / side.at("reference").get<std::string>());
    c.stopped = side.value("stopped", false);
    if (c.inputs.cols() != 1 || c.outputs.cols() != 2 || c.lab_states.cols() != kLabColumns ||
        c.lab_states.rows() != c.inputs.rows())
      throw ConfigError(dir.string() + ": lab case has the wrong shape");
    lab.cases.push_back(std::move(c));
  }
  return lab;
}

// ---- configs ----------------------------------------------------------------

Json to_json(const LabConfig& c) {
  Json j;
  j["dt"] = c.dt;
  j["observer"] = Json{{"h1t", c.observer.h1t}, {"h2t", c.observer.h2t}, {"eps", c.observer.eps}};
  j["omega"] = c.omega;
  j["zeta"] = c.zeta;
  j["w_half"] = to_json(c.w_half);
  j["w_center"] = to_json(c.w_center);
  j["vertex_share"] = c.vertex_share;
  j["w_hold_mean"] = c.w_hold_mean;
  j["quantization"] = c.quantization;
  j["delay_in"] = c.delay_in;
  j["delay_out"] = c.delay_out;
  j["stop_error"] = c.stop_error;
  j["stop_input"] = c.stop_input;
  return j;
}

LabConfig lab_config_from_json(const Json& j, LabConfig c) {
  if (!j.is_object()) throw ConfigError("lab config must be an object");
  try {
    read_field(j, "dt", c.dt);
    if (j.contains("observer")) {
      const Json& o = j.at("observer");
      read_field(o, "h1t", c.observer.h1t);
      read_field(o, "h2t", c.observer.h2t);
      read_field(o, "eps", c.observer.eps);
    }
    read_field(j, "omega", c.omega);
    read_field(j, "zeta", c.zeta);
    read_vec(j, "w_half", c.w_half);
    read_vec(j, "w_center", c.w_center);
    read_field(j, "vertex_share", c.vertex_share);
    read_field(j, "w_hold_mean", c.w_hold_mean);
    read_field(j, "quantization", c.quantization);
    read_field(j, "delay_in", c.delay_in);
    read_field(j, "delay_out", c.delay_out);
    read_field(j, "stop_error", c.stop_error);
    read_field(j, "stop_input", c.stop_input);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("lab config: ") + e.what());
  }
  return c;
}

Json to_json(const ReferenceConfig& c) {
  Json j;
  j["count"] = c.count;
  j["duration"] = c.duration;
  j["max_pos"] = c.max_pos;
  j["max_vel"] = c.max_vel;
  j["max_acc"] = c.max_acc;
  j["max_dwell"] = c.max_dwell;
  j["trapezoid_share"] = c.trapezoid_share;
  j["dt"] = c.dt;
  return j;
}

ReferenceConfig reference_config_from_json(const Json& j, ReferenceConfig c) {
  if (!j.is_object()) throw ConfigError("reference config must be an object");
  try {
    read_field(j, "count", c.count);
    read_field(j, "duration", c.duration);
    read_field(j, "max_pos", c.max_pos);
    read_field(j, "max_vel", c.max_vel);
    read_field(j, "max_acc", c.max_acc);
    read_field(j, "max_dwell", c.max_dwell);
    read_field(j, "trapezoid_share", c.trapezoid_share);
    read_field(j, "dt", c.dt);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("reference config: ") + e.what());
  }
  return c;
}

}  // namespace reachsynth
