#include "cloudctl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cloudctl {

using nlohmann::json;

void to_json(json& j, const ControllerStructure& s) {
  j = json{{"m1", s.m1}, {"m2", s.m2}, {"o", s.o}};
}

void from_json(const json& j, ControllerStructure& s) {
  j.at("m1").get_to(s.m1);
  j.at("m2").get_to(s.m2);
  j.at("o").get_to(s.o);
}

void to_json(json& j, const ControllerParams& p) {
  j = json{{"ex1", p.ex1}, {"en1", p.en1}, {"he1", p.he1}, {"ex2", p.ex2},
           {"en2", p.en2}, {"he2", p.he2}, {"exu", p.exu}, {"m1", p.m1},
           {"m2", p.m2},   {"o", p.o},     {"rl", p.rl},   {"ku", p.ku}};
}

void from_json(const json& j, ControllerParams& p) {
  j.at("ex1").get_to(p.ex1);
  j.at("en1").get_to(p.en1);
  j.at("he1").get_to(p.he1);
  j.at("ex2").get_to(p.ex2);
  j.at("en2").get_to(p.en2);
  j.at("he2").get_to(p.he2);
  j.at("exu").get_to(p.exu);
  j.at("m1").get_to(p.m1);
  j.at("m2").get_to(p.m2);
  j.at("o").get_to(p.o);
  j.at("rl").get_to(p.rl);
  j.at("ku").get_to(p.ku);
}

void to_json(json& j, const ArxPlant& p) {
  j = json{{"a", p.a}, {"b", p.b}, {"noise_std", p.noise_std}};
}

void from_json(const json& j, ArxPlant& p) {
  j.at("a").get_to(p.a);
  j.at("b").get_to(p.b);
  p.noise_std = j.value("noise_std", 0.0);
}

void to_json(json& j, const ReferenceSignal& r) {
  static const char* names[] = {"step", "constant", "square"};
  j = json{{"type", names[static_cast<int>(r.type)]},
           {"amplitude", r.amplitude},
           {"period", r.period}};
}

void from_json(const json& j, ReferenceSignal& r) {
  const std::string type = j.value("type", "step");
  if (type == "step")
    r.type = ReferenceSignal::Type::kStep;
  else if (type == "constant")
    r.type = ReferenceSignal::Type::kConstant;
  else if (type == "square")
    r.type = ReferenceSignal::Type::kSquare;
  else
    throw std::invalid_argument("reference type must be step|constant|square, got " + type);
  r.amplitude = j.value("amplitude", 1.0);
  r.period = j.value("period", 40);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: non-empty array required");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c));
  }
  return m;
}

namespace {

json cloud_to_json(const TriangularCloud& c) {
  return json{{"ex", c.ex()}, {"en", c.en()}, {"he", c.he()}};
}

TriangularCloud cloud_from_json(const json& j) {
  return TriangularCloud(j.at("ex"), j.at("en"), j.value("he", 0.0));
}

}  // namespace

json ts_rule_to_json(const TsRule& rule) {
  json ants = json::array();
  for (const TriangularCloud& c : rule.antecedents) ants.push_back(cloud_to_json(c));
  return json{{"antecedents", std::move(ants)},
              {"coeff_means", rule.coeff_means},
              {"coeff_sigmas", rule.coeff_sigmas}};
}

TsRule ts_rule_from_json(const json& j) {
  TsRule rule;
  for (const json& c : j.at("antecedents")) rule.antecedents.push_back(cloud_from_json(c));
  j.at("coeff_means").get_to(rule.coeff_means);
  if (j.contains("coeff_sigmas"))
    j.at("coeff_sigmas").get_to(rule.coeff_sigmas);
  else
    rule.coeff_sigmas.assign(rule.coeff_means.size(), 0.0);
  return rule;
}

json ts_model_to_json(const TsModel& model) {
  json rules = json::array();
  for (const TsRule& r : model.rules()) rules.push_back(ts_rule_to_json(r));
  return json{{"rules", std::move(rules)}};
}

TsModel ts_model_from_json(const json& j) {
  std::vector<TsRule> rules;
  for (const json& r : j.at("rules")) rules.push_back(ts_rule_from_json(r));
  return TsModel(std::move(rules));
}

json uncertain_plant_to_json(const UncertainTsPlant& plant) {
  json rules = json::array();
  for (const UncertainRule& r : plant.rules) {
    json ants = json::array();
    for (const TriangularCloud& c : r.antecedents) ants.push_back(cloud_to_json(c));
    rules.push_back(json{{"a", matrix_to_json(r.a)},
                         {"b", matrix_to_json(r.b)},
                         {"c", matrix_to_json(r.c)},
                         {"d1", matrix_to_json(r.d1)},
                         {"d2", matrix_to_json(r.d2)},
                         {"d3", matrix_to_json(r.d3)},
                         {"e1", matrix_to_json(r.e1)},
                         {"e2", matrix_to_json(r.e2)},
                         {"e3", matrix_to_json(r.e3)},
                         {"antecedents", std::move(ants)}});
  }
  return json{{"rules", std::move(rules)}};
}

UncertainTsPlant uncertain_plant_from_json(const json& j) {
  std::vector<UncertainRule> rules;
  for (const json& jr : j.at("rules")) {
    UncertainRule r;
    r.a = matrix_from_json(jr.at("a"));
    r.b = matrix_from_json(jr.at("b"));
    r.c = matrix_from_json(jr.at("c"));
    r.d1 = matrix_from_json(jr.at("d1"));
    r.d2 = matrix_from_json(jr.at("d2"));
    r.d3 = matrix_from_json(jr.at("d3"));
    r.e1 = matrix_from_json(jr.at("e1"));
    r.e2 = matrix_from_json(jr.at("e2"));
    r.e3 = matrix_from_json(jr.at("e3"));
    for (const json& c : jr.at("antecedents")) r.antecedents.push_back(cloud_from_json(c));
    rules.push_back(std::move(r));
  }
  return UncertainTsPlant::from_rules(std::move(rules));
}

void to_json(json& j, const Checkpoint& c) {
  j = json{{"structure", c.structure},
           {"u_bound", c.u_bound},
           {"u_min", c.u_min},
           {"u_max", c.u_max},
           {"e_gain", c.e_gain},
           {"de_gain", c.de_gain},
           {"alphas", c.alphas},
           {"best_j", c.best_j},
           {"evals", c.evals}};
}

void from_json(const json& j, Checkpoint& c) {
  j.at("structure").get_to(c.structure);
  j.at("alphas").get_to(c.alphas);
  c.u_bound = j.value("u_bound", 2.0);
  c.u_min = j.value("u_min", -c.u_bound);
  c.u_max = j.value("u_max", c.u_bound);
  c.e_gain = j.value("e_gain", 1.0);
  c.de_gain = j.value("de_gain", 1.0);
  c.best_j = j.value("best_j", 0.0);
  c.evals = j.value("evals", 0L);
}

CloudController controller_from_checkpoint(const Checkpoint& c) {
  return CloudController(decode(c.alphas, c.structure, c.u_bound), c.u_min, c.u_max);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return json::parse(text);
}

void write_json_file(const std::filesystem::path& path, json j) {
  j["schema_version"] = kSchemaVersion;
  write_text_file(path, j.dump(2) + "\n");
}

std::string trace_to_csv(const SimTrace& trace) {
  std::string out = "k,r,y,u,e\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.k);
    out += ',';
    out += format_double(row.r);
    out += ',';
    out += format_double(row.y);
    out += ',';
    out += format_double(row.u);
    out += ',';
    out += format_double(row.e);
    out += '\n';
  }
  return out;
}

std::string drops_to_csv(const std::vector<CloudDrop>& drops,
                         const std::vector<Envelope>& envelopes) {
  if (drops.size() != envelopes.size())
    throw std::invalid_argument("drops_to_csv: size mismatch");
  std::string out = "x,mu,y1,y2\n";
  for (std::size_t i = 0; i < drops.size(); ++i) {
    out += format_double(drops[i].x);
    out += ',';
    out += format_double(drops[i].mu);
    out += ',';
    out += format_double(envelopes[i].y1);
    out += ',';
    out += format_double(envelopes[i].y2);
    out += '\n';
  }
  return out;
}

std::string robust_report_to_csv(const RobustReport& report) {
  std::string out = "sample,spectral_abscissa\n";
  for (const RobustSample& s : report.samples) {
    out += std::to_string(s.index);
    out += ',';
    out += format_double(s.spectral_abscissa);
    out += '\n';
  }
  return out;
}

std::string alphas_to_csv_row(const std::vector<double>& alphas) {
  std::string out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (i) out += ',';
    out += format_double(alphas[i]);
  }
  out += '\n';
  return out;
}

std::vector<double> alphas_from_csv_row(const std::string& row) {
  std::vector<double> out;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\n') cell.pop_back();
    if (cell.empty()) continue;
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace cloudctl
