#include "ogp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "json.hpp"

namespace ogp {

PlanResult Plan(const BicycleState& sdv, const PlanInput& input) {
  const auto start = std::chrono::steady_clock::now();
  if (input.scenario == nullptr) throw ConfigurationError("plan input lacks scenario");

  CandidateSet set = GenerateCandidates(sdv, input.scenario->map,
                                        input.scenario->route, input.sampler);
  if (set.trajectories.empty()) {
    throw PlanningFailure("no candidate trajectory survived pruning");
  }

  const bool skip_occ = input.allow_occupancy_skip && input.weights.AllOccupancyZero();

  // Per-chain contexts (actor projections are candidate independent).
  std::vector<ChainActorCache> caches(set.chains.size());
  std::vector<FeatureContext> contexts(set.chains.size());
  for (size_t c = 0; c < set.chains.size(); ++c) {
    const int horizons = input.grid != nullptr ? input.grid->geometry().num_horizons
                                               : kNumHorizons;
    const double step = input.grid != nullptr ? input.grid->geometry().horizon_step : 0.5;
    caches[c] = ChainActorCache::Build(*set.chains[c], input.scenario->map,
                                       input.scenario->actors, input.plan_time,
                                       horizons, step);
    FeatureContext& ctx = contexts[c];
    ctx.scenario = input.scenario;
    ctx.grid = input.grid;
    ctx.chain = set.chains[c].get();
    ctx.plan_time = input.plan_time;
    ctx.config = &input.costs;
    ctx.cleared_stop_signs = input.cleared_stop_signs;
    ctx.actor_cache = &caches[c];
    ctx.skip_occupancy = skip_occ;
  }

  PlanResult result;
  result.sampler_stats = set.stats;
  result.num_candidates = static_cast<int>(set.trajectories.size());
  result.ranked.reserve(set.trajectories.size());

  double best_cost = std::numeric_limits<double>::infinity();
  int best_index = -1;
  FeatureVector best_features;

  for (size_t i = 0; i < set.trajectories.size(); ++i) {
    const Trajectory& traj = set.trajectories[i];
    const FeatureVector features =
        ExtractFeatures(traj, contexts[static_cast<size_t>(traj.chain_index)]);
    const double cost = TotalCost(features, input.weights);
    result.ranked.push_back({traj.id, cost});
    if (cost < best_cost) {  // strict: ties keep the lowest id
      best_cost = cost;
      best_index = static_cast<int>(i);
      best_features = features;
    }
  }

  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const CandidateCost& a, const CandidateCost& b) {
              return a.cost != b.cost ? a.cost < b.cost : a.id < b.id;
            });

  result.chosen = set.trajectories[static_cast<size_t>(best_index)];
  result.features = best_features;
  result.cost = best_cost;
  result.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return result;
}

std::string PlanResultToJson(const PlanResult& result, const CostWeights& weights) {
  nlohmann::json root;
  root["cost"] = result.cost;
  root["timing_ms"] = result.timing_ms;
  root["num_candidates"] = result.num_candidates;
  root["chosen_id"] = result.chosen.id;
  root["provenance"] = {{"lane_id", result.chosen.provenance.lane_id},
                        {"lane_slot", result.chosen.provenance.lane_slot},
                        {"lon_index", result.chosen.provenance.lon_index},
                        {"lat_index", result.chosen.provenance.lat_index}};
  nlohmann::json features, weighted;
  const auto& names = FeatureNames();
  for (int i = 0; i < kNumFeatures; ++i) {
    const double value = result.features.values[static_cast<size_t>(i)];
    features[names[static_cast<size_t>(i)]] = value;
    weighted[names[static_cast<size_t>(i)]] =
        FeatureSign(i) * weights.w[static_cast<size_t>(i)] * value;
  }
  root["features"] = features;
  root["weighted_costs"] = weighted;
  nlohmann::json states = nlohmann::json::array();
  for (const BicycleState& b : result.chosen.states) {
    states.push_back(nlohmann::json::array({b.x, b.y, b.theta, b.v, b.kappa, b.a}));
  }
  root["states"] = states;
  nlohmann::json ranked = nlohmann::json::array();
  for (const CandidateCost& c : result.ranked) {
    ranked.push_back(nlohmann::json::array({c.id, c.cost}));
  }
  root["ranked"] = ranked;
  return root.dump(2) + "\n";
}

}  // namespace ogp
