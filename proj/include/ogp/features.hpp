#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ogp/occupancy.hpp"
#include "ogp/sampler.hpp"
#include "ogp/world.hpp"

namespace ogp {

// Occupancy subclasses that carry cost weights (free excluded), in a
// fixed order shared by the feature vector and the per-horizon slices.
constexpr int kNumOccupancySubclasses = 10;
constexpr int kNumOccupancyFeatures = 2 * kNumOccupancySubclasses;
constexpr int kNumFeatures = kNumOccupancyFeatures + 19;
constexpr int kNumHorizons = 11;

const std::array<SubclassRef, kNumOccupancySubclasses>& OccupancySubclasses();

// Stable feature naming; occupancy features come first as
// occ_<class>_<subclass> / occ_<class>_<subclass>_v pairs.
const std::vector<std::string>& FeatureNames();
int FeatureIndex(const std::string& name);  // -1 when unknown
inline bool IsOccupancyFeature(int idx) { return idx < kNumOccupancyFeatures; }
// Progress is rewarded: it enters the total cost with a negative sign.
double FeatureSign(int idx);
int ProgressFeatureIndex();

// Named feature indices for the rule/comfort block.
enum RuleFeature : int {
  kHeadway = kNumOccupancyFeatures,
  kDrivingPath,
  kLaneBoundary,
  kRoadBoundary,
  kSpeedLimit,
  kStopLine,
  kRouteLaneChange,
  kDeadEnd,
  kProgress,
  kCostToGo,
  kJerk,
  kJerkViolation,
  kAccel,
  kAccelViolation,
  kLatAcc,
  kLatAccViolation,
  kCurvature,
  kCurvatureRate,
  kCurvatureAccel
};

struct FeatureVector {
  std::array<double, kNumFeatures> values{};
  // Per-horizon occupancy contributions; summing a column over the 11
  // horizons reproduces the corresponding flat feature exactly.
  std::array<std::array<double, kNumOccupancyFeatures>, kNumHorizons> occ_slices{};
};

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CostWeights {
  std::array<double, kNumFeatures> w{};

  static CostWeights Uniform(double value = 1.0);
  // Requires the map keys to match the feature catalog exactly.
  static CostWeights FromMap(const std::map<std::string, double>& named);
  std::map<std::string, double> ToMap() const;

  // Exponentiated-gradient domain check.
  void ValidatePositive() const;
  bool AllOccupancyZero() const;
  CostWeights WithOccupancyZeroed() const;
};

// Linear in the weights; progress enters negatively.
double TotalCost(const FeatureVector& f, const CostWeights& w);
double RuleCost(const FeatureVector& f, const CostWeights& w);
double OccupancyCostAtHorizon(const FeatureVector& f, const CostWeights& w,
                              int horizon);

struct VehicleParams {
  double length = 4.7;
  double width = 2.0;
  double rear_axle_offset = 1.4;
};

struct CostConfig {
  double lambda = 0.5;  // safety margin for the velocity-weighted term
  double jerk_threshold = 2.0;
  double accel_threshold = 2.0;
  double decel_threshold = 3.0;
  double lat_acc_threshold = 3.0;
  double headway_reaction_time = 0.5;
  double sdv_brake_decel = 6.0;
  double lead_brake_decel = 4.0;
  double dead_end_threshold = 30.0;
  double cost_to_go_lookahead = 150.0;
  VehicleParams vehicle;
};

// Safe following distance behind a lead vehicle: reaction distance
// plus the braking-distance difference under the assumed decelerations.
double SafeHeadwayDistance(double v_sdv, double v_lead, const CostConfig& cfg);

// Chain-frame actor projections shared by all candidates of a plan
// cycle (headway would otherwise reproject per candidate).
struct ChainActorCache {
  struct Entry {
    double s = 0.0;
    double v = 0.0;
    double half_length = 0.0;
    bool in_lane = false;
  };
  int num_horizons = 0;
  size_t num_actors = 0;
  std::vector<Entry> entries;  // [horizon * num_actors + actor]

  static ChainActorCache Build(const LaneChain& chain, const LaneMap& map,
                               const std::vector<Actor>& actors,
                               double plan_time, int num_horizons,
                               double horizon_step);
  const Entry& At(int horizon, size_t actor) const {
    return entries[static_cast<size_t>(horizon) * num_actors + actor];
  }
};

struct FeatureContext {
  const Scenario* scenario = nullptr;
  const SemanticOccupancyGrid* grid = nullptr;
  const LaneChain* chain = nullptr;
  double plan_time = 0.0;
  const CostConfig* config = nullptr;
  const std::vector<uint8_t>* cleared_stop_signs = nullptr;  // optional
  const ChainActorCache* actor_cache = nullptr;              // optional
  bool skip_occupancy = false;  // planner shortcut for zeroed weights
};

FeatureVector ExtractFeatures(const Trajectory& traj, const FeatureContext& ctx);

// Individual blocks, exposed for targeted tests.
void AddOccupancyFeatures(const Trajectory& traj, const FeatureContext& ctx,
                          FeatureVector* out);
void AddRuleFeatures(const Trajectory& traj, const FeatureContext& ctx,
                     FeatureVector* out);
void AddComfortFeatures(const Trajectory& traj, const FeatureContext& ctx,
                        FeatureVector* out);
void AddHeadwayFeature(const Trajectory& traj, const FeatureContext& ctx,
                       FeatureVector* out);

}  // namespace ogp
