#include "ogp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ogp {

namespace {

constexpr double kSeverityBase = 0.5;
constexpr double kSeverityClamp = 10.0;

// Collision severity against ground-truth boxes: overlap indicator
// scaled by a bounded closing-speed term.
double SafetyLoss(const BicycleState& state, const VehicleParams& vp,
                  const std::vector<Actor>& actors, double t) {
  FootprintPolygon fp;
  fp.length = vp.length;
  fp.width = vp.width;
  fp.rear_axle_offset = vp.rear_axle_offset;
  fp.x = state.x;
  fp.y = state.y;
  fp.theta = state.theta;
  const auto sdv_corners = fp.Corners();

  double worst = 0.0;
  for (const Actor& actor : actors) {
    const auto actor_corners = actor.FootprintAt(t).Corners();
    if (!ConvexOverlap(sdv_corners, actor_corners)) continue;
    const ActorPose pose = actor.PoseAt(t);
    const Vec2 to_actor = pose.position - fp.Center();
    const double dist = to_actor.Norm();
    const Vec2 dir = dist > 1e-9 ? (1.0 / dist) * to_actor : Heading(state.theta);
    const Vec2 rel_v = state.v * Heading(state.theta) - pose.v * Heading(pose.theta);
    const double closing = std::max(0.0, rel_v.Dot(dir));
    worst = std::max(worst, kSeverityBase + std::min(closing, kSeverityClamp));
  }
  return worst;
}

}  // namespace

TrainingExample BuildTrainingExample(const Scenario& scenario,
                                     const SamplerConfig& sampler_cfg,
                                     const CostConfig& cost_cfg,
                                     const ProducerParams& producer) {
  if (scenario.expert.empty()) {
    throw InvalidInputError("training scenario lacks an expert trajectory");
  }
  TrainingExample example;
  example.name = scenario.name;

  GridGeometry geom;
  geom.center = scenario.sdv.Position();
  geom.heading = scenario.sdv.theta;
  const SemanticOccupancyGrid grid = RasterizeScene(scenario, 0.0, geom, producer);

  CandidateSet set = GenerateCandidates(scenario.sdv, scenario.map,
                                        scenario.route, sampler_cfg);
  if (set.trajectories.empty()) {
    throw PlanningFailure("no candidates for training example");
  }

  std::vector<ChainActorCache> caches(set.chains.size());
  std::vector<FeatureContext> contexts(set.chains.size());
  for (size_t c = 0; c < set.chains.size(); ++c) {
    caches[c] = ChainActorCache::Build(*set.chains[c], scenario.map,
                                       scenario.actors, 0.0,
                                       geom.num_horizons, geom.horizon_step);
    contexts[c] = FeatureContext{&scenario, &grid,          set.chains[c].get(), 0.0,
                                 &cost_cfg, nullptr,        &caches[c],          false};
  }

  const int stride = 5;  // 0.5 s horizons over 0.1 s states
  example.candidates.reserve(set.trajectories.size());
  example.losses.imitation.reserve(set.trajectories.size());
  for (const Trajectory& traj : set.trajectories) {
    example.candidates.push_back(
        ExtractFeatures(traj, contexts[static_cast<size_t>(traj.chain_index)]));
    example.candidate_ids.push_back(traj.id);

    double l1 = 0.0;
    std::array<double, kNumHorizons> safety{};
    for (int h = 0; h < kNumHorizons; ++h) {
      const size_t k = static_cast<size_t>(h * stride);
      const BicycleState& b = traj.states[k];
      const BicycleState& e = scenario.expert[k];
      l1 += std::abs(b.x - e.x) + std::abs(b.y - e.y);
      safety[static_cast<size_t>(h)] =
          SafetyLoss(b, cost_cfg.vehicle, scenario.actors, 0.5 * h);
    }
    example.losses.imitation.push_back(l1);
    example.losses.safety.push_back(safety);
  }

  // Expert features through the identical pipeline, referenced to the
  // current-lane chain (chain 0 by construction).
  Trajectory expert_traj;
  expert_traj.id = -1;
  expert_traj.chain_index = 0;
  expert_traj.states = scenario.expert;
  expert_traj.frenet.reserve(scenario.expert.size());
  double hint = -1.0;
  for (const BicycleState& b : scenario.expert) {
    const FrenetState f = BicycleToFrenet(b, set.chains[0]->path, hint);
    hint = f.s;
    expert_traj.frenet.push_back(f);
  }
  example.expert = ExtractFeatures(expert_traj, contexts[0]);
  for (int h = 0; h < kNumHorizons; ++h) {
    example.losses.expert_safety[static_cast<size_t>(h)] = SafetyLoss(
        scenario.expert[static_cast<size_t>(h * stride)], cost_cfg.vehicle,
        scenario.actors, 0.5 * h);
  }
  return example;
}

namespace {

double CandidateBracket(const TrainingExample& example, const CostWeights& w,
                        size_t index, double expert_rule_cost) {
  const FeatureVector& cand = example.candidates[index];
  double bracket = expert_rule_cost - RuleCost(cand, w) +
                   example.losses.imitation[index];
  for (int h = 0; h < kNumHorizons; ++h) {
    const double inner = OccupancyCostAtHorizon(example.expert, w, h) -
                         OccupancyCostAtHorizon(cand, w, h) +
                         example.losses.safety[index][static_cast<size_t>(h)];
    if (inner > 0.0) bracket += inner;
  }
  return bracket;
}

double ExpertBracket(const TrainingExample& example) {
  // Rule and occupancy terms cancel against itself; only the safety
  // task losses remain.
  double bracket = 0.0;
  for (double l : example.losses.expert_safety) {
    if (l > 0.0) bracket += l;
  }
  return bracket;
}

}  // namespace

MarginEvaluation MaxMarginLoss(const TrainingExample& example,
                               const CostWeights& w) {
  if (example.candidates.empty()) {
    throw InvalidInputError("training example has no candidates");
  }
  const double expert_rule = RuleCost(example.expert, w);
  MarginEvaluation eval;
  double best = ExpertBracket(example);
  int best_index = -1;
  for (size_t i = 0; i < example.candidates.size(); ++i) {
    const double bracket = CandidateBracket(example, w, i, expert_rule);
    if (bracket > best) {
      best = bracket;
      best_index = static_cast<int>(i);
    }
  }
  eval.loss = std::max(0.0, best);
  eval.argmax_index = best_index;
  return eval;
}

GradientVector Subgradient(const TrainingExample& example, const CostWeights& w) {
  GradientVector g{};
  const MarginEvaluation eval = MaxMarginLoss(example, w);
  if (eval.loss <= 0.0 || eval.argmax_index < 0) return g;

  const FeatureVector& cand = example.candidates[static_cast<size_t>(eval.argmax_index)];
  for (int i = kNumOccupancyFeatures; i < kNumFeatures; ++i) {
    g[static_cast<size_t>(i)] =
        FeatureSign(i) * (example.expert.values[static_cast<size_t>(i)] -
                          cand.values[static_cast<size_t>(i)]);
  }
  for (int h = 0; h < kNumHorizons; ++h) {
    const double inner =
        OccupancyCostAtHorizon(example.expert, w, h) -
        OccupancyCostAtHorizon(cand, w, h) +
        example.losses.safety[static_cast<size_t>(eval.argmax_index)][static_cast<size_t>(h)];
    if (inner <= 0.0) continue;
    for (int q = 0; q < kNumOccupancyFeatures; ++q) {
      g[static_cast<size_t>(q)] +=
          example.expert.occ_slices[static_cast<size_t>(h)][static_cast<size_t>(q)] -
          cand.occ_slices[static_cast<size_t>(h)][static_cast<size_t>(q)];
    }
  }
  return g;
}

CostWeights EgStep(const CostWeights& w, const GradientVector& g, double alpha) {
  CostWeights out = w;
  for (size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      throw ConfigurationError("non-finite gradient in exponentiated-gradient step");
    }
    out.w[i] = w.w[i] * std::exp(-alpha * g[i]);
  }
  return out;
}

TrainResult Train(const std::vector<TrainingExample>& dataset,
                  const TrainConfig& config) {
  if (dataset.empty()) throw InvalidInputError("empty training dataset");
  TrainResult result;
  CostWeights w = CostWeights::Uniform(config.initial_weight);
  w.ValidatePositive();
  double alpha = config.alpha;

  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  double initial_loss = -1.0;
  int divergence_streak = 0;
  int plateau_streak = 0;
  int restarts = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const CostWeights epoch_start = w;

    double epoch_loss = 0.0;
    for (size_t b = 0; b < order.size(); b += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(order.size(), b + static_cast<size_t>(config.batch_size));
      GradientVector batch_grad{};
      double batch_loss = 0.0;
      for (size_t k = b; k < end; ++k) {
        const TrainingExample& example = dataset[order[k]];
        batch_loss += MaxMarginLoss(example, w).loss;
        const GradientVector g = Subgradient(example, w);
        for (size_t i = 0; i < g.size(); ++i) batch_grad[i] += g[i];
      }
      const double inv = 1.0 / static_cast<double>(end - b);
      for (double& gi : batch_grad) gi *= inv;
      epoch_loss += batch_loss;
      if (alpha > 0.0) w = EgStep(w, batch_grad, alpha);
    }
    epoch_loss /= static_cast<double>(dataset.size());

    if (initial_loss < 0.0) initial_loss = epoch_loss;
    if (initial_loss > 0.0 && epoch_loss > config.divergence_factor * initial_loss) {
      if (++divergence_streak >= config.divergence_epochs && restarts < 20) {
        alpha *= 0.5;
        w = epoch_start;
        divergence_streak = 0;
        ++restarts;
        --epoch;  // redo this epoch at the smaller rate
        continue;
      }
    } else {
      divergence_streak = 0;
    }

    result.epoch_losses.push_back(epoch_loss);
    if (result.epoch_losses.size() >= 2) {
      const double prev = result.epoch_losses[result.epoch_losses.size() - 2];
      if (std::abs(epoch_loss - prev) <=
          config.plateau_rel_eps * std::max(prev, 1e-12)) {
        if (++plateau_streak >= config.plateau_patience) break;
      } else {
        plateau_streak = 0;
      }
    }
  }

  w.ValidatePositive();
  result.weights = w;
  result.alpha_final = alpha;
  return result;
}

}  // namespace ogp
