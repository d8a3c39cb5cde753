#include <cmath>
#include <random>

#include "doctest.h"
#include "ogp/learner.hpp"
#include "oracles.hpp"

using namespace ogp;

namespace {

// Synthetic example with consistent occupancy slices.
TrainingExample RandomExample(std::mt19937_64& rng, int num_candidates,
                              double loss_scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrainingExample ex;
  auto fill = [&](FeatureVector* f) {
    for (int q = 0; q < kNumOccupancyFeatures; ++q) {
      double sum = 0.0;
      for (int h = 0; h < kNumHorizons; ++h) {
        const double v = 0.2 * u(rng);
        f->occ_slices[size_t(h)][size_t(q)] = v;
        sum += v;
      }
      f->values[size_t(q)] = sum;
    }
    for (int i = kNumOccupancyFeatures; i < kNumFeatures; ++i) {
      f->values[size_t(i)] = 2.0 * u(rng);
    }
  };
  fill(&ex.expert);
  for (int c = 0; c < num_candidates; ++c) {
    FeatureVector f;
    fill(&f);
    ex.candidates.push_back(f);
    ex.candidate_ids.push_back(c);
    ex.losses.imitation.push_back(loss_scale * u(rng));
    std::array<double, kNumHorizons> safety{};
    for (int h = 0; h < kNumHorizons; ++h) {
      safety[size_t(h)] = u(rng) < 0.2 ? loss_scale * u(rng) : 0.0;
    }
    ex.losses.safety.push_back(safety);
  }
  ex.losses.expert_safety.fill(0.0);
  return ex;
}

CostWeights RandomWeights(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.0);
  CostWeights w;
  for (double& wi : w.w) wi = u(rng);
  return w;
}

// Distance of the evaluation from any hinge kink: the outer max gap,
// the outer hinge at zero, and every inner hinge.
double KinkMargin(const TrainingExample& ex, const CostWeights& w) {
  const double expert_rule = RuleCost(ex.expert, w);
  double best = 0.0, second = -1e100;
  for (double l : ex.losses.expert_safety) best += std::max(0.0, l);
  for (size_t i = 0; i < ex.candidates.size(); ++i) {
    double bracket = expert_rule - RuleCost(ex.candidates[i], w) +
                     ex.losses.imitation[i];
    double inner_margin = 1e100;
    for (int h = 0; h < kNumHorizons; ++h) {
      const double inner = OccupancyCostAtHorizon(ex.expert, w, h) -
                           OccupancyCostAtHorizon(ex.candidates[i], w, h) +
                           ex.losses.safety[i][size_t(h)];
      inner_margin = std::min(inner_margin, std::abs(inner));
      if (inner > 0.0) bracket += inner;
    }
    if (bracket > best) {
      second = best;
      best = bracket;
    } else {
      second = std::max(second, bracket);
    }
    if (inner_margin < 1e-3) return 0.0;  // an inner hinge sits near zero
  }
  return std::min(std::abs(best), best - second);
}

}  // namespace

TEST_SUITE("learner") {

TEST_CASE("loss is zero when the expert wins every margin") {
  TrainingExample ex;
  ex.expert.values[kProgress] = 50.0;  // cheap expert (progress is rewarded)
  FeatureVector cand;
  cand.values[kJerk] = 100.0;  // expensive candidate
  ex.candidates.push_back(cand);
  ex.candidate_ids.push_back(0);
  ex.losses.imitation.push_back(1.0);
  ex.losses.safety.push_back({});
  ex.losses.expert_safety.fill(0.0);

  const CostWeights w = CostWeights::Uniform(1.0);
  const MarginEvaluation eval = MaxMarginLoss(ex, w);
  CHECK(eval.loss == 0.0);
  const GradientVector g = Subgradient(ex, w);
  for (double gi : g) CHECK(gi == 0.0);
}

TEST_CASE("single candidate identical to the expert gives zero loss") {
  std::mt19937_64 rng(61);
  TrainingExample ex = RandomExample(rng, 1);
  ex.candidates[0] = ex.expert;
  ex.losses.imitation[0] = 0.0;
  ex.losses.safety[0].fill(0.0);
  ex.losses.expert_safety.fill(0.0);
  const MarginEvaluation eval = MaxMarginLoss(ex, CostWeights::Uniform(1.0));
  CHECK(eval.loss == 0.0);
}

TEST_CASE("three-candidate toy equals direct arithmetic") {
  // Hand-set numbers, no occupancy: bracket_i =
  //   rule(expert) - rule(cand_i) + l_im_i.
  TrainingExample ex;
  ex.expert.values[kJerk] = 1.0;  // expert rule cost 1 under unit weights
  const double cand_costs[3] = {0.5, 2.0, 1.2};
  const double imit[3] = {0.4, 0.1, 0.05};
  for (int c = 0; c < 3; ++c) {
    FeatureVector f;
    f.values[kJerk] = cand_costs[c];
    ex.candidates.push_back(f);
    ex.candidate_ids.push_back(c);
    ex.losses.imitation.push_back(imit[c]);
    ex.losses.safety.push_back({});
  }
  ex.losses.expert_safety.fill(0.0);
  CostWeights w = CostWeights::Uniform(1.0);

  // Brackets: 1-0.5+0.4 = 0.9; 1-2+0.1 = -0.9; 1-1.2+0.05 = -0.15.
  const MarginEvaluation eval = MaxMarginLoss(ex, w);
  CHECK(eval.loss == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(eval.argmax_index == 0);
  CHECK(oracle::MarginLossDirect(ex, w) == doctest::Approx(eval.loss).epsilon(1e-12));
}

TEST_CASE("random examples match the direct-arithmetic oracle") {
  std::mt19937_64 rng(67);
  std::uniform_int_distribution<int> nc(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const TrainingExample ex = RandomExample(rng, nc(rng));
    const CostWeights w = RandomWeights(rng);
    const MarginEvaluation eval = MaxMarginLoss(ex, w);
    CHECK(eval.loss == doctest::Approx(oracle::MarginLossDirect(ex, w)).epsilon(1e-12));
    CHECK(eval.loss >= 0.0);
  }
}

TEST_CASE("expert participates in the max through its safety losses") {
  std::mt19937_64 rng(71);
  TrainingExample ex = RandomExample(rng, 2);
  // Make every candidate bracket very negative.
  for (auto& f : ex.candidates) f.values[kJerk] += 1e3;
  for (auto& l : ex.losses.imitation) l = 0.0;
  for (auto& s : ex.losses.safety) s.fill(0.0);
  ex.losses.expert_safety.fill(0.5);  // expert collides everywhere
  const MarginEvaluation eval = MaxMarginLoss(ex, CostWeights::Uniform(1.0));
  CHECK(eval.loss == doctest::Approx(11 * 0.5));
  CHECK(eval.argmax_index == -1);
  // Constant w.r.t. the weights: zero gradient.
  const GradientVector g = Subgradient(ex, CostWeights::Uniform(1.0));
  for (double gi : g) CHECK(gi == 0.0);
}

TEST_CASE("subgradient: pure rule case is the feature difference") {
  TrainingExample ex;
  ex.expert.values[kJerk] = 2.0;
  ex.expert.values[kProgress] = 10.0;
  FeatureVector cand;
  cand.values[kJerk] = 1.0;
  cand.values[kProgress] = 30.0;
  ex.candidates.push_back(cand);
  ex.candidate_ids.push_back(0);
  ex.losses.imitation.push_back(0.3);
  ex.losses.safety.push_back({});
  ex.losses.expert_safety.fill(0.0);

  const CostWeights w = CostWeights::Uniform(1.0);
  // Bracket: (2 - 10) - (1 - 30) + 0.3 = 21.3 > 0.
  REQUIRE(MaxMarginLoss(ex, w).loss == doctest::Approx(21.3));
  const GradientVector g = Subgradient(ex, w);
  CHECK(g[kJerk] == doctest::Approx(2.0 - 1.0));
  CHECK(g[kProgress] == doctest::Approx(-(10.0 - 30.0)));
  CHECK(g[kHeadway] == 0.0);
}

TEST_CASE("subgradient matches central finite differences off the kinks") {
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<int> nc(2, 6);
  int accepted = 0;
  while (accepted < 50) {
    const TrainingExample ex = RandomExample(rng, nc(rng), 2.0);
    const CostWeights w = RandomWeights(rng);
    if (MaxMarginLoss(ex, w).loss <= 1e-3) continue;
    if (KinkMargin(ex, w) < 1e-3) continue;  // too close to a hinge
    const GradientVector g = Subgradient(ex, w);
    const GradientVector fd = oracle::MarginGradientFd(ex, w, 1e-6);
    for (int i = 0; i < kNumFeatures; ++i) {
      const double scale = std::max({std::abs(g[size_t(i)]),
                                     std::abs(fd[size_t(i)]), 1e-6});
      CHECK(std::abs(g[size_t(i)] - fd[size_t(i)]) / scale < 1e-4);
    }
    ++accepted;
  }
}

TEST_CASE("exponentiated gradient step") {
  CostWeights w = CostWeights::Uniform(2.0);

  SUBCASE("zero gradient leaves the weights unchanged") {
    GradientVector g{};
    const CostWeights next = EgStep(w, g, 1e-3);
    for (int i = 0; i < kNumFeatures; ++i) CHECK(next.w[size_t(i)] == 2.0);
  }
  SUBCASE("closed-form value") {
    GradientVector g{};
    g.fill(100.0);
    const CostWeights next = EgStep(w, g, 1e-3);
    for (int i = 0; i < kNumFeatures; ++i) {
      CHECK(next.w[size_t(i)] == doctest::Approx(2.0 * std::exp(-0.1)).epsilon(1e-12));
      CHECK(next.w[size_t(i)] == doctest::Approx(1.8097).epsilon(1e-4));
    }
  }
  SUBCASE("positivity for any finite gradient") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    for (int trial = 0; trial < 1000; ++trial) {
      GradientVector g{};
      for (double& gi : g) gi = u(rng);
      w = EgStep(w, g, 1e-3);
      for (double wi : w.w) {
        CHECK(wi > 0.0);
        CHECK(std::isfinite(wi));
      }
      // Rescale into a sane band so the loop cannot overflow.
      for (double& wi : w.w) wi = std::clamp(wi, 1e-6, 1e6);
    }
  }
  SUBCASE("non-finite gradient aborts the step") {
    GradientVector g{};
    g[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(EgStep(w, g, 1e-3), ConfigurationError);
  }
}

TEST_CASE("training") {
  std::mt19937_64 rng(83);

  SUBCASE("expert-optimal dataset keeps the loss at zero") {
    std::vector<TrainingExample> dataset;
    for (int e = 0; e < 4; ++e) {
      TrainingExample ex;
      ex.expert.values[kProgress] = 100.0;
      FeatureVector cand;
      cand.values[kJerk] = 50.0;
      ex.candidates.push_back(cand);
      ex.candidate_ids.push_back(0);
      ex.losses.imitation.push_back(1.0);
      ex.losses.safety.push_back({});
      ex.losses.expert_safety.fill(0.0);
      dataset.push_back(ex);
    }
    TrainConfig config;
    config.epochs = 5;
    const TrainResult result = Train(dataset, config);
    for (double loss : result.epoch_losses) CHECK(loss == 0.0);
    for (double wi : result.weights.w) CHECK(wi == 1.0);
  }

  SUBCASE("zero learning rate leaves the weights unchanged") {
    std::vector<TrainingExample> dataset = {RandomExample(rng, 4),
                                            RandomExample(rng, 4)};
    TrainConfig config;
    config.alpha = 0.0;
    config.epochs = 3;
    const TrainResult result = Train(dataset, config);
    for (double wi : result.weights.w) CHECK(wi == 1.0);
  }

  SUBCASE("weights stay strictly positive across a run") {
    std::vector<TrainingExample> dataset;
    for (int e = 0; e < 6; ++e) dataset.push_back(RandomExample(rng, 5, 3.0));
    TrainConfig config;
    config.epochs = 40;
    config.alpha = 5e-3;
    const TrainResult result = Train(dataset, config);
    for (double wi : result.weights.w) CHECK(wi > 0.0);
    CHECK(result.epoch_losses.size() <= 40);
  }

  SUBCASE("loss is invariant to candidate order") {
    TrainingExample ex = RandomExample(rng, 6);
    const CostWeights w = RandomWeights(rng);
    const double base = MaxMarginLoss(ex, w).loss;
    // Rotate the candidates.
    std::rotate(ex.candidates.begin(), ex.candidates.begin() + 2, ex.candidates.end());
    std::rotate(ex.losses.imitation.begin(), ex.losses.imitation.begin() + 2,
                ex.losses.imitation.end());
    std::rotate(ex.losses.safety.begin(), ex.losses.safety.begin() + 2,
                ex.losses.safety.end());
    CHECK(MaxMarginLoss(ex, w).loss == doctest::Approx(base).epsilon(1e-12));
  }
}

}  // TEST_SUITE
