#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudctl/controller.hpp"
#include "cloudctl/hinf.hpp"
#include "cloudctl/plant.hpp"
#include "cloudctl/ts.hpp"

namespace cloudctl {

inline constexpr int kSchemaVersion = 1;

// ---- JSON (de)serialization -------------------------------------------

void to_json(nlohmann::json& j, const ControllerStructure& s);
void from_json(const nlohmann::json& j, ControllerStructure& s);

void to_json(nlohmann::json& j, const ControllerParams& p);
void from_json(const nlohmann::json& j, ControllerParams& p);

void to_json(nlohmann::json& j, const ArxPlant& p);
void from_json(const nlohmann::json& j, ArxPlant& p);

void to_json(nlohmann::json& j, const ReferenceSignal& r);
void from_json(const nlohmann::json& j, ReferenceSignal& r);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json ts_rule_to_json(const TsRule& rule);
TsRule ts_rule_from_json(const nlohmann::json& j);
nlohmann::json ts_model_to_json(const TsModel& model);
TsModel ts_model_from_json(const nlohmann::json& j);

nlohmann::json uncertain_plant_to_json(const UncertainTsPlant& plant);
UncertainTsPlant uncertain_plant_from_json(const nlohmann::json& j);

// Tuning checkpoint: the encoded alpha vector plus everything needed to
// rebuild the controller.
struct Checkpoint {
  ControllerStructure structure;
  double u_bound = 2.0;
  double u_min = -2.0, u_max = 2.0;
  double e_gain = 1.0, de_gain = 1.0;
  std::vector<double> alphas;
  double best_j = 0.0;
  long evals = 0;
};

void to_json(nlohmann::json& j, const Checkpoint& c);
void from_json(const nlohmann::json& j, Checkpoint& c);

CloudController controller_from_checkpoint(const Checkpoint& c);

// ---- files -------------------------------------------------------------

// Fixed-format floating point ("%.17g"): value-exact and byte-stable.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Adds schema_version and writes with a trailing newline.
void write_json_file(const std::filesystem::path& path, nlohmann::json j);

// ---- CSV ---------------------------------------------------------------

std::string trace_to_csv(const SimTrace& trace);                 // k,r,y,u,e
std::string drops_to_csv(const std::vector<CloudDrop>& drops,
                         const std::vector<Envelope>& envelopes);  // x,mu,y1,y2
std::string robust_report_to_csv(const RobustReport& report);    // sample,spectral_abscissa

// One flat CSV row of parameter values; round-trips exactly.
std::string alphas_to_csv_row(const std::vector<double>& alphas);
std::vector<double> alphas_from_csv_row(const std::string& row);

}  // namespace cloudctl
