#include <doctest.h>

#include <filesystem>

#include "cloudctl/io.hpp"
#include "cloudctl/rng.hpp"

using namespace cloudctl;
using nlohmann::json;

TEST_CASE("controller params JSON round-trip") {
  const ControllerStructure s{2, 3, 4};
  Rng rng(1);
  std::vector<double> alphas(static_cast<std::size_t>(param_count(s.m1, s.m2, s.o)));
  for (double& a : alphas) a = rng.uniform(0.01, 0.99);
  const ControllerParams p = decode(alphas, s, 2.0);
  const json j = p;
  const ControllerParams back = j.get<ControllerParams>();
  CHECK(back.ex1 == p.ex1);
  CHECK(back.he2 == p.he2);
  CHECK(back.rl == p.rl);
  CHECK(back.ku == p.ku);
}

TEST_CASE("alpha CSV row round-trips exactly") {
  Rng rng(2);
  std::vector<double> alphas(37);
  for (double& a : alphas) a = rng.uniform01();
  const std::string row = alphas_to_csv_row(alphas);
  const std::vector<double> back = alphas_from_csv_row(row);
  REQUIRE(back.size() == alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(back[i] == alphas[i]);
}

TEST_CASE("checkpoint JSON round-trip and controller rebuild") {
  Checkpoint cp;
  cp.structure = {3, 3, 5};
  cp.u_bound = 4.0;
  cp.u_min = -4.0;
  cp.u_max = 4.0;
  Rng rng(3);
  cp.alphas.resize(static_cast<std::size_t>(param_count(3, 3, 5)));
  for (double& a : cp.alphas) a = rng.uniform(0.01, 0.99);
  cp.best_j = 12.5;
  cp.evals = 321;

  const json j = cp;
  const Checkpoint back = j.get<Checkpoint>();
  CHECK(back.alphas == cp.alphas);
  CHECK(back.best_j == cp.best_j);
  CHECK(back.evals == cp.evals);
  CHECK_NOTHROW(controller_from_checkpoint(back));
}

TEST_CASE("ts model JSON round-trip") {
  TsRule rule;
  rule.antecedents = {TriangularCloud(0.0, 1.0, 0.1), TriangularCloud(0.5, 2.0, 0.0)};
  rule.coeff_means = {1.0, -0.5, 0.25};
  rule.coeff_sigmas = {0.0, 0.1, 0.0};
  const TsModel model({rule});
  const TsModel back = ts_model_from_json(ts_model_to_json(model));
  CHECK(back.rules().size() == 1);
  CHECK(back.rules()[0].coeff_means == rule.coeff_means);
  CHECK(back.rules()[0].antecedents[0].he() == 0.1);
}

TEST_CASE("uncertain plant JSON round-trip") {
  Eigen::MatrixXd a(2, 2);
  a << -1.0, 0.5, 0.0, -2.0;
  UncertainRule rule;
  rule.a = a;
  rule.b = Eigen::MatrixXd::Ones(2, 1);
  rule.c = Eigen::MatrixXd::Ones(1, 2);
  rule.d1 = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  rule.e1 = Eigen::MatrixXd::Identity(2, 2);
  rule.d2 = Eigen::MatrixXd::Zero(2, 1);
  rule.e2 = Eigen::MatrixXd::Zero(1, 1);
  rule.d3 = Eigen::MatrixXd::Zero(1, 1);
  rule.e3 = Eigen::MatrixXd::Zero(1, 2);
  rule.antecedents = {TriangularCloud(0.0, 1.0, 0.1)};
  const UncertainTsPlant plant = UncertainTsPlant::from_rules({rule});
  const UncertainTsPlant back = uncertain_plant_from_json(uncertain_plant_to_json(plant));
  CHECK(back.n == 2);
  CHECK((back.rules[0].a - a).norm() == 0.0);
  CHECK(back.rules[0].antecedents[0].en() == 1.0);
}

TEST_CASE("trace CSV shape") {
  SimTrace trace;
  trace.rows = {{1, 1.0, 0.0, 0.5, 1.0}, {2, 1.0, 0.25, 0.4, 0.75}};
  const std::string csv = trace_to_csv(trace);
  CHECK(csv.substr(0, 10) == "k,r,y,u,e\n");
  CHECK(csv.find("2,1,0.25,") != std::string::npos);
}

TEST_CASE("json files carry a schema version") {
  const auto path = std::filesystem::temp_directory_path() / "cloudctl_io_test.json";
  write_json_file(path, json{{"x", 1}});
  const json j = read_json_file(path);
  CHECK(j.at("schema_version") == kSchemaVersion);
  std::filesystem::remove(path);
}
