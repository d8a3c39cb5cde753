#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ogp/planner.hpp"
#include "ogp/world.hpp"

namespace ogp {

struct SimConfig {
  double step = 0.1;       // replan/execute cadence, s
  double duration = 15.0;  // s
  double emergency_decel = 6.0;
};

struct StepRecord {
  double t = 0.0;
  BicycleState sdv;
  int plan_id = -1;
  uint64_t grid_signature = 0;
  bool fallback = false;
  bool collision = false;
};

struct SimulationRun {
  std::string scenario_name;
  uint64_t seed = 0;
  std::vector<StepRecord> steps;
  bool had_collision = false;
  int first_collision_step = -1;
  int fallback_count = 0;

  uint64_t Hash() const;
};

// Replans every step, executes the chosen trajectory for one step,
// advances scripted actors, and records collisions against ground
// truth. Planner failures engage a straight emergency stop.
SimulationRun RunClosedLoop(const Scenario& scenario, const CostWeights& weights,
                            const SimConfig& sim, const SamplerConfig& sampler,
                            const CostConfig& costs, const ProducerParams& producer);

struct ClosedLoopReport {
  int num_runs = 0;
  double collision_rate_percent = 0.0;  // % of runs with >= 1 collision
  double mean_abs_jerk = 0.0;           // m/s^3 over all steps
  double mean_abs_lat_acc = 0.0;        // m/s^2
  double mean_accel = 0.0;              // over steps with a > 0
  double mean_decel = 0.0;              // over steps with a < 0 (signed)
  double mean_speed = 0.0;              // m/s

  std::string ToCsv() const;
  std::string ToText() const;
  uint64_t Hash() const;
};

ClosedLoopReport SummarizeRuns(const std::vector<SimulationRun>& runs);

struct OpenLoopReport {
  int num_examples = 0;
  double collision_rate_1s = 0.0;  // cumulative, percent
  double collision_rate_3s = 0.0;
  double collision_rate_5s = 0.0;
  double l2_human_1s = 0.0;  // m
  double l2_human_3s = 0.0;
  double l2_human_5s = 0.0;
  double mean_abs_jerk = 0.0;
  double mean_abs_lat_acc = 0.0;
  double mean_progress = 0.0;  // m

  std::string ToCsv() const;
  std::string ToText() const;
  uint64_t Hash() const;
};

// Single plan per example, executed open loop for the full horizon
// against recorded ground truth.
OpenLoopReport OpenLoopEval(const std::vector<Scenario>& dataset,
                            const CostWeights& weights,
                            const SamplerConfig& sampler, const CostConfig& costs,
                            const ProducerParams& producer);

// Parameter sweep over a template: actor speeds, along-lane offsets and
// actor count; duplicates collapse. Used by the occluded-conflict suite.
struct SuiteVariations {
  std::vector<double> speeds;
  std::vector<double> offsets;
  std::vector<int> counts;  // subset of {1, 2}
};

// The occluded right-turn conflict layout: SDV approaches a junction
// behind parked trucks; non-compliant vehicles enter from the side
// road. Eighty scenarios by default.
std::vector<Scenario> MakeOccludedConflictSuite(const SuiteVariations& variations,
                                                uint64_t seed);
SuiteVariations DefaultConflictVariations();

// Straight multi-lane driving scenes (leads, blockers, adjacent
// traffic) used for weight-recovery training sets.
std::vector<Scenario> MakeLaneDrivingSuite(int count, uint64_t seed);

// Plans once at t = 0 with the given weights and stores the chosen
// trajectory as the scenario's expert.
void AttachExpert(Scenario* scenario, const CostWeights& weights,
                  const SamplerConfig& sampler, const CostConfig& costs,
                  const ProducerParams& producer);

// Runs the scenario suite with the given weights and summarizes.
ClosedLoopReport RunSuite(const std::vector<Scenario>& suite,
                          const CostWeights& weights, const SimConfig& sim,
                          const SamplerConfig& sampler, const CostConfig& costs,
                          const ProducerParams& producer,
                          std::vector<SimulationRun>* runs_out = nullptr);

}  // namespace ogp
