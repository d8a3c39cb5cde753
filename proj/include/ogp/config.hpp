#pragma once

#include <cstdint>
#include <string>

#include "ogp/features.hpp"
#include "ogp/learner.hpp"
#include "ogp/occupancy.hpp"
#include "ogp/sampler.hpp"
#include "ogp/simulator.hpp"

namespace ogp {

// Everything a CLI run needs; every block is optional in the file and
// falls back to the defaults below. Unknown keys are rejected.
struct RunConfig {
  SamplerConfig sampler;
  CostConfig costs;
  ProducerParams producer;
  TrainConfig learner;
  SimConfig simulator;

  static RunConfig Defaults() { return RunConfig{}; }
};

RunConfig LoadRunConfig(const std::string& path);
RunConfig ParseRunConfig(const std::string& json_text);
std::string SerializeRunConfig(const RunConfig& config);

// FNV-1a over the canonical serialization; recorded in run manifests.
uint64_t ConfigHash(const RunConfig& config);

// manifest.json written next to every CLI artifact: tool version,
// command, config hash and seed for exact reproduction.
void WriteManifest(const std::string& directory, const std::string& command,
                   const RunConfig& config, uint64_t seed);

extern const char* kToolVersion;

}  // namespace ogp
