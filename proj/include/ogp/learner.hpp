#pragma once

#include <string>
#include <vector>

#include "ogp/features.hpp"
#include "ogp/occupancy.hpp"
#include "ogp/planner.hpp"
#include "ogp/world.hpp"

namespace ogp {

using GradientVector = std::array<double, kNumFeatures>;

// Imitation and per-horizon safety task losses for every candidate,
// plus the expert's own safety losses (the expert participates in the
// margin maximization as a virtual candidate).
struct TaskLosses {
  std::vector<double> imitation;                          // per candidate
  std::vector<std::array<double, kNumHorizons>> safety;   // per candidate
  std::array<double, kNumHorizons> expert_safety{};
};

struct TrainingExample {
  std::string name;
  std::vector<FeatureVector> candidates;
  std::vector<int> candidate_ids;
  FeatureVector expert;
  TaskLosses losses;
};

// Builds one example from a scenario carrying an expert trajectory:
// grid at plan time 0, the sampler's candidate set, features for every
// candidate and the expert through the same pipeline, task losses from
// ground-truth actor boxes.
TrainingExample BuildTrainingExample(const Scenario& scenario,
                                     const SamplerConfig& sampler_cfg,
                                     const CostConfig& cost_cfg,
                                     const ProducerParams& producer);

struct MarginEvaluation {
  double loss = 0.0;
  int argmax_index = -1;  // -1: the expert's own bracket dominates
};

// Hinged max-margin objective with per-horizon hinges on the occupancy
// cost differences and an outer hinge over the maximum across
// candidates (the expert included as an implicit candidate).
MarginEvaluation MaxMarginLoss(const TrainingExample& example,
                               const CostWeights& w);

// Exact subgradient via linearity of the costs in w; zero when the
// loss vanishes or the expert attains the max.
GradientVector Subgradient(const TrainingExample& example, const CostWeights& w);

// Multiplicative update w <- w * exp(-alpha g); preserves positivity.
CostWeights EgStep(const CostWeights& w, const GradientVector& g, double alpha);

struct TrainConfig {
  double alpha = 1e-3;
  int epochs = 80;
  int batch_size = 8;
  uint64_t seed = 1;
  double initial_weight = 1.0;
  int divergence_epochs = 3;
  double divergence_factor = 5.0;
  int plateau_patience = 12;
  double plateau_rel_eps = 1e-7;
};

struct TrainResult {
  CostWeights weights;
  std::vector<double> epoch_losses;  // mean over examples per epoch
  double alpha_final = 0.0;
};

TrainResult Train(const std::vector<TrainingExample>& dataset,
                  const TrainConfig& config);

}  // namespace ogp
