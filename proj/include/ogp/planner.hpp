#pragma once

#include <string>
#include <vector>

#include "ogp/features.hpp"
#include "ogp/occupancy.hpp"
#include "ogp/sampler.hpp"
#include "ogp/world.hpp"

namespace ogp {

struct PlanningFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CandidateCost {
  int id = 0;
  double cost = 0.0;
};

struct PlanResult {
  Trajectory chosen;
  FeatureVector features;
  double cost = 0.0;
  std::vector<CandidateCost> ranked;  // ascending cost, ties by id
  double timing_ms = 0.0;
  int num_candidates = 0;
  SamplerStats sampler_stats;
};

struct PlanInput {
  const Scenario* scenario = nullptr;
  double plan_time = 0.0;
  const SemanticOccupancyGrid* grid = nullptr;
  CostWeights weights;
  SamplerConfig sampler;
  CostConfig costs;
  const std::vector<uint8_t>* cleared_stop_signs = nullptr;
  // Skip occupancy queries when every occupancy weight is zero (the
  // cost is unchanged; the recorded occupancy features read as zero).
  bool allow_occupancy_skip = false;
};

// Scores every candidate and returns the strict argmin (ties broken by
// the lowest candidate id). Throws PlanningFailure when no candidate
// survives pruning.
PlanResult Plan(const BicycleState& sdv, const PlanInput& input);

// Audit record: named features, per-term weighted costs, ranked
// candidate list and the chosen state sequence.
std::string PlanResultToJson(const PlanResult& result, const CostWeights& weights);

}  // namespace ogp
