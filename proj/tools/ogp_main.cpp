// Command-line entry points: plan a single snapshot, run the
// closed-loop simulator, train cost weights from demonstrations,
// evaluate open-loop metrics, render SVG frames and generate scenario
// suites.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ogp/config.hpp"
#include "ogp/learner.hpp"
#include "ogp/planner.hpp"
#include "ogp/render.hpp"
#include "ogp/scenario_io.hpp"
#include "ogp/simulator.hpp"

namespace fs = std::filesystem;
using namespace ogp;

namespace {

RunConfig LoadConfigOrDefault(const std::string& path) {
  if (path.empty()) return RunConfig::Defaults();
  return LoadRunConfig(path);
}

CostWeights LoadWeightsOrUniform(const std::string& path) {
  if (path.empty()) return CostWeights::Uniform(1.0);
  return CostWeights::FromMap(LoadWeightsFile(path));
}

std::vector<Scenario> LoadScenarioDir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json" &&
        entry.path().filename() != "manifest.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> scenarios;
  scenarios.reserve(files.size());
  for (const fs::path& f : files) scenarios.push_back(LoadScenario(f.string()));
  return scenarios;
}

int CmdPlan(const std::string& scenario_path, const std::string& weights_path,
            const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  const Scenario scenario = LoadScenario(scenario_path);
  const CostWeights weights = LoadWeightsOrUniform(weights_path);

  GridGeometry geom;
  geom.center = scenario.sdv.Position();
  geom.heading = scenario.sdv.theta;
  const SemanticOccupancyGrid grid =
      RasterizeScene(scenario, 0.0, geom, cfg.producer);

  PlanInput input;
  input.scenario = &scenario;
  input.plan_time = 0.0;
  input.grid = &grid;
  input.weights = weights;
  input.sampler = cfg.sampler;
  input.costs = cfg.costs;
  const PlanResult result = Plan(scenario.sdv, input);

  fs::create_directories(out_dir);
  WriteTextFile(out_dir + "/plan_result.json", PlanResultToJson(result, weights));
  WriteManifest(out_dir, "plan", cfg, scenario.seed);
  std::cout << "plan: " << result.num_candidates << " candidates, chosen id "
            << result.chosen.id << ", cost " << result.cost << ", "
            << result.timing_ms << " ms\n";
  if (grid.clipped_paintings() > 0) {
    std::cout << "note: " << grid.clipped_paintings()
              << " actor paintings fell outside the grid\n";
  }
  return 0;
}

int CmdSimulate(const std::string& scenario_path, const std::string& weights_path,
                const std::string& config_path, const std::string& out_dir,
                bool ablate_occupancy) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  const Scenario scenario = LoadScenario(scenario_path);
  CostWeights weights = LoadWeightsOrUniform(weights_path);
  if (ablate_occupancy) weights = weights.WithOccupancyZeroed();

  const SimulationRun run = RunClosedLoop(scenario, weights, cfg.simulator,
                                          cfg.sampler, cfg.costs, cfg.producer);
  const ClosedLoopReport report = SummarizeRuns({run});

  fs::create_directories(out_dir);
  WriteTextFile(out_dir + "/closed_loop_report.csv", report.ToCsv());
  WriteTextFile(out_dir + "/closed_loop_report.txt", report.ToText());
  std::ostringstream frames;
  frames.precision(17);
  frames << "t,x,y,theta,v,kappa,a,plan_id,fallback,collision,grid_signature\n";
  for (const StepRecord& r : run.steps) {
    frames << r.t << "," << r.sdv.x << "," << r.sdv.y << "," << r.sdv.theta << ","
           << r.sdv.v << "," << r.sdv.kappa << "," << r.sdv.a << "," << r.plan_id
           << "," << (r.fallback ? 1 : 0) << "," << (r.collision ? 1 : 0) << ","
           << r.grid_signature << "\n";
  }
  WriteTextFile(out_dir + "/run_frames.csv", frames.str());
  WriteManifest(out_dir, "simulate", cfg, scenario.seed);
  std::cout << report.ToText();
  std::cout << "run hash: " << run.Hash() << "\n";
  return 0;
}

int CmdTrain(const std::string& dataset_dir, const std::string& config_path,
             const std::string& out_weights, const std::string& out_history) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  const std::vector<Scenario> scenarios = LoadScenarioDir(dataset_dir);
  if (scenarios.empty()) {
    std::cerr << "error: no scenario files in " << dataset_dir << "\n";
    return 1;
  }
  std::vector<TrainingExample> dataset;
  dataset.reserve(scenarios.size());
  for (const Scenario& scenario : scenarios) {
    dataset.push_back(
        BuildTrainingExample(scenario, cfg.sampler, cfg.costs, cfg.producer));
  }
  const TrainResult result = Train(dataset, cfg.learner);

  SaveWeightsFile(result.weights.ToMap(), out_weights);
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,mean_loss\n";
  for (size_t e = 0; e < result.epoch_losses.size(); ++e) {
    csv << e << "," << result.epoch_losses[e] << "\n";
  }
  WriteTextFile(out_history, csv.str());
  const fs::path out_dir = fs::path(out_weights).parent_path();
  WriteManifest(out_dir.empty() ? "." : out_dir.string(), "train", cfg,
                cfg.learner.seed);
  std::cout << "trained on " << dataset.size() << " examples over "
            << result.epoch_losses.size() << " epochs; final mean loss "
            << (result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back())
            << "\n";
  return 0;
}

int CmdEval(const std::string& dataset_dir, const std::string& weights_path,
            const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  const std::vector<Scenario> dataset = LoadScenarioDir(dataset_dir);
  const CostWeights weights = LoadWeightsOrUniform(weights_path);
  const OpenLoopReport report =
      OpenLoopEval(dataset, weights, cfg.sampler, cfg.costs, cfg.producer);
  fs::create_directories(out_dir);
  WriteTextFile(out_dir + "/open_loop_report.csv", report.ToCsv());
  WriteTextFile(out_dir + "/open_loop_report.txt", report.ToText());
  WriteManifest(out_dir, "eval", cfg, 0);
  std::cout << report.ToText();
  return 0;
}

int CmdRender(const std::string& scenario_path, const std::string& weights_path,
              const std::string& config_path, const std::string& out_path,
              int horizon, bool with_plan) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  const Scenario scenario = LoadScenario(scenario_path);
  GridGeometry geom;
  geom.center = scenario.sdv.Position();
  geom.heading = scenario.sdv.theta;
  const SemanticOccupancyGrid grid =
      RasterizeScene(scenario, 0.0, geom, cfg.producer);

  RenderOptions options;
  options.horizon = horizon;
  if (with_plan) {
    const CostWeights weights = LoadWeightsOrUniform(weights_path);
    PlanInput input;
    input.scenario = &scenario;
    input.plan_time = 0.0;
    input.grid = &grid;
    input.weights = weights;
    input.sampler = cfg.sampler;
    input.costs = cfg.costs;
    const PlanResult result = Plan(scenario.sdv, input);
    CandidateSet set = GenerateCandidates(scenario.sdv, scenario.map,
                                          scenario.route, cfg.sampler);
    RenderSvg(scenario, &grid, &set.trajectories, &result.chosen, options, out_path);
  } else {
    RenderSvg(scenario, &grid, nullptr, nullptr, options, out_path);
  }
  std::cout << "rendered " << out_path << "\n";
  return 0;
}

int CmdGenScenarios(const std::string& suite, int count, uint64_t seed,
                    const std::string& expert_weights_path,
                    const std::string& config_path, const std::string& out_dir) {
  const RunConfig cfg = LoadConfigOrDefault(config_path);
  std::vector<Scenario> scenarios;
  if (suite == "occluded-conflict") {
    scenarios = MakeOccludedConflictSuite(DefaultConflictVariations(), seed);
  } else if (suite == "lane-driving") {
    scenarios = MakeLaneDrivingSuite(count, seed);
  } else {
    std::cerr << "error: unknown suite '" << suite
              << "' (expected occluded-conflict or lane-driving)\n";
    return 1;
  }
  if (!expert_weights_path.empty()) {
    const CostWeights expert_w = LoadWeightsOrUniform(expert_weights_path);
    for (Scenario& sc : scenarios) {
      AttachExpert(&sc, expert_w, cfg.sampler, cfg.costs, cfg.producer);
    }
  }
  fs::create_directories(out_dir);
  for (const Scenario& sc : scenarios) {
    SaveScenario(sc, out_dir + "/" + sc.name + ".json");
  }
  WriteManifest(out_dir, "gen-scenarios", cfg, seed);
  std::cout << "wrote " << scenarios.size() << " scenarios to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lane-lattice motion planner over semantic occupancy grids"};
  app.require_subcommand(1);

  std::string scenario_path, weights_path, config_path, out_dir = "out";
  std::string dataset_dir, out_weights = "weights.json",
                           out_history = "loss_history.csv";
  std::string render_out = "frame.svg", suite = "occluded-conflict";
  std::string expert_weights;
  int horizon = 0, count = 80;
  uint64_t seed = 7;
  bool ablate = false, with_plan = false;

  auto* plan = app.add_subcommand("plan", "plan one snapshot and dump the result");
  plan->add_option("--scenario", scenario_path)->required();
  plan->add_option("--weights", weights_path);
  plan->add_option("--config", config_path);
  plan->add_option("--out", out_dir);

  auto* simulate = app.add_subcommand("simulate", "closed-loop run on one scenario");
  simulate->add_option("--scenario", scenario_path)->required();
  simulate->add_option("--weights", weights_path);
  simulate->add_option("--config", config_path);
  simulate->add_option("--out", out_dir);
  simulate->add_flag("--ablate-occupancy", ablate,
                     "zero all occupancy weights before running");

  auto* train = app.add_subcommand("train", "learn weights from demonstrations");
  train->add_option("--dataset", dataset_dir)->required();
  train->add_option("--config", config_path);
  train->add_option("--out-weights", out_weights);
  train->add_option("--out-history", out_history);

  auto* eval = app.add_subcommand("eval", "open-loop metric suite");
  eval->add_option("--dataset", dataset_dir)->required();
  eval->add_option("--weights", weights_path);
  eval->add_option("--config", config_path);
  eval->add_option("--out", out_dir);

  auto* render = app.add_subcommand("render", "SVG frame of a scenario");
  render->add_option("--scenario", scenario_path)->required();
  render->add_option("--weights", weights_path);
  render->add_option("--config", config_path);
  render->add_option("--out", render_out);
  render->add_option("--horizon", horizon, "occupancy horizon index (0..10)");
  render->add_flag("--with-plan", with_plan, "draw candidates and the chosen plan");

  auto* gen = app.add_subcommand("gen-scenarios", "write a scenario suite");
  gen->add_option("--suite", suite, "occluded-conflict | lane-driving");
  gen->add_option("--count", count, "scenario count (lane-driving)");
  gen->add_option("--seed", seed);
  gen->add_option("--expert-weights", expert_weights,
                  "attach expert trajectories planned with these weights");
  gen->add_option("--config", config_path);
  gen->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      return CmdPlan(scenario_path, weights_path, config_path, out_dir);
    }
    if (simulate->parsed()) {
      return CmdSimulate(scenario_path, weights_path, config_path, out_dir, ablate);
    }
    if (train->parsed()) {
      return CmdTrain(dataset_dir, config_path, out_weights, out_history);
    }
    if (eval->parsed()) {
      return CmdEval(dataset_dir, weights_path, config_path, out_dir);
    }
    if (render->parsed()) {
      return CmdRender(scenario_path, weights_path, config_path, render_out,
                       horizon, with_plan);
    }
    if (gen->parsed()) {
      return CmdGenScenarios(suite, count, seed, expert_weights, config_path,
                             out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
