#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "cloudctl/io.hpp"
#include "cloudctl/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out, "output directory")->required();
  cmd->add_option("--seed", args.seed, "random seed")->each([&](const std::string&) {
    args.seed_given = true;
  });
}

json load_config(const CommonArgs& args) {
  try {
    return cloudctl::read_json_file(args.config_path);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("config", std::string("cannot parse config: ") + e.what());
  }
}

cloudctl::TuningProblem problem_from_config(const json& cfg) {
  cloudctl::TuningProblem problem;
  problem.plant = cfg.at("plant").get<cloudctl::ArxPlant>();
  if (cfg.contains("reference")) problem.ref = cfg.at("reference").get<cloudctl::ReferenceSignal>();
  if (cfg.contains("sim")) {
    const json& sim = cfg.at("sim");
    problem.loop.steps = sim.value("steps", 200);
    problem.loop.dt = sim.value("dt", 1.0);
    problem.loop.overflow = sim.value("overflow", 1e9);
    problem.sim_seed = sim.value("sim_seed", std::uint64_t{1});
  }
  if (cfg.contains("controller") && !cfg.at("controller").is_null()) {
    const json& ctl = cfg.at("controller");
    if (ctl.contains("structure"))
      problem.structure = ctl.at("structure").get<cloudctl::ControllerStructure>();
    problem.u_bound = ctl.value("u_bound", 2.0);
    problem.u_min = ctl.value("u_min", -problem.u_bound);
    problem.u_max = ctl.value("u_max", problem.u_bound);
    problem.e_gain = ctl.value("e_gain", 1.0);
    problem.de_gain = ctl.value("de_gain", 1.0);
    problem.loop.e_gain = problem.e_gain;
    problem.loop.de_gain = problem.de_gain;
  }
  return problem;
}

// Explicit alphas, a checkpoint path, or none (zero actuation).
std::optional<std::vector<double>> controller_alphas(const json& cfg) {
  if (!cfg.contains("controller") || cfg.at("controller").is_null()) return std::nullopt;
  const json& ctl = cfg.at("controller");
  if (ctl.contains("alphas")) return ctl.at("alphas").get<std::vector<double>>();
  if (ctl.contains("checkpoint")) {
    const auto cp = cloudctl::read_json_file(ctl.at("checkpoint").get<std::string>())
                        .get<cloudctl::Checkpoint>();
    return cp.alphas;
  }
  return std::nullopt;
}

cloudctl::ChaosConfig chaos_config(const json& cfg, const char* key = "chaos") {
  cloudctl::ChaosConfig c;
  if (cfg.contains(key)) {
    const json& j = cfg.at(key);
    c.n_traj = j.value("n_traj", c.n_traj);
    c.max_evals = j.value("max_evals", c.max_evals);
    c.j_stop = j.value("j_stop", c.j_stop);
    c.shrink = j.value("shrink", c.shrink);
    c.rounds_per_shrink = j.value("rounds_per_shrink", c.rounds_per_shrink);
    c.scale_intervals = j.value("scale_intervals", c.scale_intervals);
  }
  return c;
}

cloudctl::GaConfig ga_config(const json& cfg) {
  cloudctl::GaConfig g;
  if (cfg.contains("ga")) {
    const json& j = cfg.at("ga");
    g.population = j.value("population", g.population);
    g.mutation_sigma = j.value("mutation_sigma", g.mutation_sigma);
    g.crossover_rate = j.value("crossover_rate", g.crossover_rate);
    g.tournament = j.value("tournament", g.tournament);
    g.elites = j.value("elites", g.elites);
  }
  return g;
}

cloudctl::CgConfig cg_config(const json& cfg) {
  cloudctl::CgConfig c;
  if (cfg.contains("cg")) {
    const json& j = cfg.at("cg");
    c.grad_h = j.value("grad_h", c.grad_h);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.line_tol = j.value("line_tol", c.line_tol);
  }
  return c;
}

cloudctl::HybridConfig hybrid_config(const json& cfg) {
  cloudctl::HybridConfig h;
  h.chaos = chaos_config(cfg);
  h.cg = cg_config(cfg);
  if (cfg.contains("hybrid")) h.handoff_factor = cfg.at("hybrid").value("handoff_factor", 5.0);
  return h;
}

json summary_of_trace(const cloudctl::SimTrace& trace, bool diverged) {
  return json{{"j1", cloudctl::j1(trace)},
              {"steps", trace.rows.size()},
              {"final_abs_e", trace.rows.empty() ? 0.0 : std::abs(trace.rows.back().e)},
              {"diverged", diverged}};
}

int cmd_drops(const CommonArgs& args, double ex, double en, double he, int n) {
  cloudctl::TriangularCloud cloud(ex, en, he);
  cloudctl::Rng rng(args.seed);
  std::vector<cloudctl::CloudDrop> drops;
  std::vector<cloudctl::Envelope> envelopes;
  const double span = en + 3.0 * he;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(ex - span, ex + span);
    drops.push_back(cloud.drop(x, rng));
    envelopes.push_back(cloud.envelope(x));
  }
  cloudctl::write_text_file(args.out, cloudctl::drops_to_csv(drops, envelopes));
  return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
  const json cfg = load_config(args);
  cloudctl::TuningProblem problem = problem_from_config(cfg);
  if (args.seed_given) problem.sim_seed = args.seed;

  std::optional<cloudctl::CloudController> controller;
  if (const auto alphas = controller_alphas(cfg))
    controller.emplace(cloudctl::build_controller(problem, *alphas));

  cloudctl::SimTrace trace;
  bool diverged = false;
  try {
    trace = cloudctl::run_closed_loop(problem.plant, controller ? &*controller : nullptr,
                                      problem.ref, problem.loop, problem.sim_seed);
  } catch (const cloudctl::DivergedRun& d) {
    trace = d.partial;
    diverged = true;
  }
  const fs::path out(args.out);
  cloudctl::write_text_file(out / "trace.csv", cloudctl::trace_to_csv(trace));
  cloudctl::write_json_file(out / "summary.json", summary_of_trace(trace, diverged));
  return kExitOk;
}

cloudctl::Checkpoint make_checkpoint(const cloudctl::TuningProblem& problem,
                                     const std::vector<double>& alphas, double best_j,
                                     long evals) {
  cloudctl::Checkpoint cp;
  cp.structure = problem.structure;
  cp.u_bound = problem.u_bound;
  cp.u_min = problem.u_min;
  cp.u_max = problem.u_max;
  cp.e_gain = problem.e_gain;
  cp.de_gain = problem.de_gain;
  cp.alphas = alphas;
  cp.best_j = best_j;
  cp.evals = evals;
  return cp;
}

int cmd_tune_offline(const CommonArgs& args) {
  const json cfg = load_config(args);
  const cloudctl::TuningProblem problem = problem_from_config(cfg);
  cloudctl::ChaosConfig chaos = chaos_config(cfg);

  std::string convergence = "round,best_j,evals\n";
  chaos.observer = [&](int round, double best_j, long evals) {
    convergence += std::to_string(round) + ',' + cloudctl::format_double(best_j) + ',' +
                   std::to_string(evals) + '\n';
  };
  const auto space = cloudctl::controller_search_space(problem.structure);
  const auto objective = cloudctl::make_j1_objective(problem);
  const cloudctl::OptResult res = cloudctl::chaos_optimize(objective, space, chaos, args.seed);
  if (res.best.empty()) {
    std::cerr << "tune-offline: no feasible candidate found\n";
    return kExitNumerical;
  }

  const fs::path out(args.out);
  cloudctl::write_json_file(out / "checkpoint.json",
                            make_checkpoint(problem, res.best, res.best_j, res.evals));
  cloudctl::write_text_file(out / "convergence.csv", convergence);
  cloudctl::write_text_file(out / "alphas.csv", cloudctl::alphas_to_csv_row(res.best));
  cloudctl::write_json_file(out / "result.json", json{{"best_j", res.best_j},
                                                      {"evals", res.evals},
                                                      {"rounds", res.iters},
                                                      {"reached", res.reached}});
  return kExitOk;
}

int cmd_tune_online(const CommonArgs& args, const std::string& checkpoint_path) {
  const json cfg = load_config(args);
  cloudctl::TuningProblem problem = problem_from_config(cfg);
  if (args.seed_given) problem.sim_seed = args.seed;

  const auto cp =
      cloudctl::read_json_file(checkpoint_path).get<cloudctl::Checkpoint>();
  cloudctl::OnlineConfig online;
  if (cfg.contains("online")) {
    online.window = cfg.at("online").value("window", online.window);
    online.epochs = cfg.at("online").value("epochs", online.epochs);
    online.grad_h = cfg.at("online").value("grad_h", online.grad_h);
  }

  const cloudctl::OnlineResult res = cloudctl::online_tune(problem, cp.alphas, online);
  const fs::path out(args.out);
  cloudctl::write_json_file(out / "checkpoint.json",
                            make_checkpoint(problem, res.alphas, res.j1, res.evals));
  cloudctl::write_text_file(out / "trace.csv", cloudctl::trace_to_csv(res.trace));
  cloudctl::write_json_file(out / "summary.json",
                            json{{"j1", res.j1},
                                 {"evals", res.evals},
                                 {"updates", res.updates},
                                 {"diverged", res.diverged}});
  return res.diverged ? kExitNumerical : kExitOk;
}

int cmd_tune_hybrid(const CommonArgs& args) {
  const json cfg = load_config(args);
  const cloudctl::TuningProblem problem = problem_from_config(cfg);
  cloudctl::HybridConfig hybrid = hybrid_config(cfg);
  const double j_stop = cfg.contains("chaos") ? cfg.at("chaos").value("j_stop", 1e-3) : 1e-3;
  const long max_evals =
      cfg.contains("chaos") ? cfg.at("chaos").value("max_evals", 100000L) : 100000L;

  std::string convergence = "round,best_j,evals\n";
  hybrid.chaos.observer = [&](int round, double best_j, long evals) {
    convergence += std::to_string(round) + ',' + cloudctl::format_double(best_j) + ',' +
                   std::to_string(evals) + '\n';
  };
  const auto space = cloudctl::controller_search_space(problem.structure);
  const auto objective = cloudctl::make_j1_objective(problem);
  const cloudctl::HybridResult res =
      cloudctl::hybrid_optimize(objective, space, hybrid, j_stop, max_evals, args.seed);
  if (res.combined.best.empty()) {
    std::cerr << "tune-hybrid: no feasible candidate found\n";
    return kExitNumerical;
  }

  const fs::path out(args.out);
  cloudctl::write_json_file(
      out / "checkpoint.json",
      make_checkpoint(problem, res.combined.best, res.combined.best_j, res.combined.evals));
  cloudctl::write_text_file(out / "convergence.csv", convergence);
  cloudctl::write_json_file(out / "phases.json",
                            json{{"chaos_evals", res.chaos_phase.evals},
                                 {"chaos_best_j", res.chaos_phase.best_j},
                                 {"cg_evals", res.cg_phase.evals},
                                 {"cg_iters", res.cg_phase.iters},
                                 {"best_j", res.combined.best_j},
                                 {"total_evals", res.combined.evals},
                                 {"reached", res.combined.reached}});
  return kExitOk;
}

int cmd_hinf(const CommonArgs& args) {
  const json cfg = load_config(args);
  const cloudctl::UncertainTsPlant plant =
      cloudctl::uncertain_plant_from_json(cfg.at("hinf_plant"));
  const double eps_scale =
      cfg.contains("hinf") ? cfg.at("hinf").value("eps_scale", 1e-6) : 1e-6;
  const int n_samples = cfg.contains("hinf") ? cfg.at("hinf").value("samples", 100) : 100;

  const cloudctl::SynthesisResult synth = cloudctl::synthesize_all(plant, eps_scale);
  const cloudctl::RobustReport report =
      cloudctl::robust_verify(plant, synth.compensators, n_samples, args.seed);

  json comps = json::array();
  for (const cloudctl::Compensator& c : synth.compensators)
    comps.push_back(json{{"a_hat", cloudctl::matrix_to_json(c.a_hat)},
                         {"b_c", cloudctl::matrix_to_json(c.b_c)},
                         {"c_c", cloudctl::matrix_to_json(c.c_c)}});
  json certs = json::array();
  for (const cloudctl::SynthesisCertificate& c : synth.certs)
    certs.push_back(json{{"p", cloudctl::matrix_to_json(c.p)},
                         {"q", cloudctl::matrix_to_json(c.q)},
                         {"n_residual", cloudctl::matrix_to_json(c.n_res)},
                         {"coupling_ok", c.coupling_ok},
                         {"eps", c.eps}});
  json pairs = json::array();
  for (const cloudctl::PairCheck& pc : synth.pairs)
    pairs.push_back(json{{"i", pc.i},
                         {"j", pc.j},
                         {"overlap", pc.overlap},
                         {"spectral_abscissa", pc.spectral_abscissa},
                         {"brl_ok", pc.brl_ok}});

  const fs::path out(args.out);
  cloudctl::write_json_file(out / "compensators.json", json{{"compensators", comps}});
  cloudctl::write_json_file(out / "certificates.json",
                            json{{"certificates", certs},
                                 {"pairs", pairs},
                                 {"robust_pass", report.pass},
                                 {"robust_worst_abscissa", report.worst}});
  cloudctl::write_text_file(out / "robust.csv", cloudctl::robust_report_to_csv(report));
  return report.pass ? kExitOk : kExitNumerical;
}

int cmd_compare(const CommonArgs& args) {
  const json cfg = load_config(args);
  const cloudctl::TuningProblem problem = problem_from_config(cfg);

  cloudctl::CompareConfig cc;
  cc.chaos = chaos_config(cfg);
  cc.ga = ga_config(cfg);
  cc.hybrid = hybrid_config(cfg);
  cc.cg = cg_config(cfg);
  cc.seed0 = args.seed;
  if (cfg.contains("compare")) {
    const json& j = cfg.at("compare");
    if (j.contains("methods")) j.at("methods").get_to(cc.methods);
    cc.n_seeds = j.value("n_seeds", cc.n_seeds);
    cc.max_evals = j.value("max_evals", cc.max_evals);
    cc.j_stop = j.value("j_stop", cc.j_stop);
  }

  const auto comparisons = cloudctl::compare_methods(problem, cc);

  std::string table = "method,seed,evals,reached\n";
  json medians = json::object();
  for (const cloudctl::MethodComparison& mc : comparisons) {
    for (const cloudctl::CompareRun& run : mc.runs) {
      table += mc.method + ',' + std::to_string(run.seed) + ',' +
               (run.reached ? std::to_string(run.evals) : std::string("inf")) + ',' +
               (run.reached ? "1" : "0") + '\n';
    }
    medians[mc.method] = json{{"median_evals", mc.median_reached ? json(mc.median_evals) : json()},
                              {"reached", mc.median_reached}};
  }
  const fs::path out(args.out);
  cloudctl::write_text_file(out / "table.csv", table);
  cloudctl::write_json_file(out / "summary.json", json{{"medians", medians},
                                                       {"n_seeds", cc.n_seeds},
                                                       {"j_stop", cc.j_stop},
                                                       {"max_evals", cc.max_evals}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triangle-cloud control toolkit: simulation, tuning and robust synthesis"};
  app.require_subcommand(1);

  CommonArgs drops_args;
  double ex = 0.0, en = 1.0, he = 0.0;
  int n_drops = 1000;
  auto* drops = app.add_subcommand("drops", "sample cloud drops with envelope columns");
  drops->add_option("--ex", ex, "expected value");
  drops->add_option("--en", en, "entropy")->check(CLI::PositiveNumber);
  drops->add_option("--he", he, "hyper-entropy")->check(CLI::NonNegativeNumber);
  drops->add_option("--n", n_drops, "number of drops")->check(CLI::PositiveNumber);
  drops->add_option("--seed", drops_args.seed, "random seed");
  drops->add_option("--out", drops_args.out, "output CSV file")->required();

  CommonArgs sim_args, off_args, on_args, hyb_args, hinf_args, cmp_args;
  std::string checkpoint_path;
  add_common(app.add_subcommand("simulate", "closed-loop run, trace CSV + summary"), sim_args,
             true);
  add_common(app.add_subcommand("tune-offline", "chaos search for the controller parameters"),
             off_args, true);
  auto* online = app.add_subcommand("tune-online", "conjugate-gradient online refinement");
  add_common(online, on_args, true);
  online->add_option("--checkpoint", checkpoint_path, "chaos checkpoint to start from")
      ->required();
  add_common(app.add_subcommand("tune-hybrid", "chaos search followed by CG refinement"),
             hyb_args, true);
  add_common(app.add_subcommand("hinf", "robust compensator synthesis for an uncertain plant"),
             hinf_args, true);
  add_common(app.add_subcommand("compare", "optimizer comparison table"), cmp_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("drops")) return cmd_drops(drops_args, ex, en, he, n_drops);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_args);
    if (app.got_subcommand("tune-offline")) return cmd_tune_offline(off_args);
    if (app.got_subcommand("tune-online")) return cmd_tune_online(on_args, checkpoint_path);
    if (app.got_subcommand("tune-hybrid")) return cmd_tune_hybrid(hyb_args);
    if (app.got_subcommand("hinf")) return cmd_hinf(hinf_args);
    if (app.got_subcommand("compare")) return cmd_compare(cmp_args);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cloudctl::NoStabilizingSolution& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const cloudctl::SingularCoupling& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
