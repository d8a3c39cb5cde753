#include "ogp/config.hpp"

#include <cstring>
#include <set>

#include "json.hpp"
#include "ogp/scenario_io.hpp"

namespace ogp {

using nlohmann::json;

const char* kToolVersion = "0.1.0";

namespace {

void RejectUnknownKeys(const json& obj, const std::set<std::string>& known,
                       const std::string& block) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (known.find(key) == known.end()) {
      throw ConfigurationError("unknown key '" + key + "' in config block '" +
                               block + "'");
    }
  }
}

void RequireRange(bool ok, const std::string& what) {
  if (!ok) throw ConfigurationError("config value out of range: " + what);
}

void ParseSampler(const json& j, SamplerConfig* c) {
  RejectUnknownKeys(j,
                    {"horizon", "dt", "t1_values", "lateral_offsets", "s1_times",
                     "extra_speed", "fixed_speed_targets", "a_max", "a_min",
                     "kappa_max", "include_neighbor_lanes", "chain_length"},
                    "sampler");
  c->horizon = j.value("horizon", c->horizon);
  c->dt = j.value("dt", c->dt);
  if (j.contains("t1_values")) c->t1_values = j.at("t1_values").get<std::vector<double>>();
  if (j.contains("lateral_offsets")) {
    c->lateral_offsets = j.at("lateral_offsets").get<std::vector<double>>();
  }
  if (j.contains("s1_times")) c->s1_times = j.at("s1_times").get<std::vector<double>>();
  c->extra_speed = j.value("extra_speed", c->extra_speed);
  if (j.contains("fixed_speed_targets")) {
    c->fixed_speed_targets = j.at("fixed_speed_targets").get<std::vector<double>>();
  }
  c->a_max = j.value("a_max", c->a_max);
  c->a_min = j.value("a_min", c->a_min);
  c->kappa_max = j.value("kappa_max", c->kappa_max);
  c->include_neighbor_lanes = j.value("include_neighbor_lanes", c->include_neighbor_lanes);
  c->chain_length = j.value("chain_length", c->chain_length);
  RequireRange(c->horizon > 0.0 && c->horizon <= 30.0, "sampler.horizon");
  RequireRange(c->dt > 0.0 && c->dt <= c->horizon, "sampler.dt");
  RequireRange(c->a_max > 0.0 && c->a_min < 0.0, "sampler acceleration limits");
  RequireRange(c->kappa_max > 0.0, "sampler.kappa_max");
}

void ParseCosts(const json& j, CostConfig* c) {
  RejectUnknownKeys(
      j, {"lambda", "jerk_threshold", "accel_threshold", "decel_threshold",
          "lat_acc_threshold", "headway_reaction_time", "sdv_brake_decel",
          "lead_brake_decel", "dead_end_threshold", "cost_to_go_lookahead",
          "vehicle_length", "vehicle_width", "vehicle_rear_axle_offset"},
      "costs");
  c->lambda = j.value("lambda", c->lambda);
  c->jerk_threshold = j.value("jerk_threshold", c->jerk_threshold);
  c->accel_threshold = j.value("accel_threshold", c->accel_threshold);
  c->decel_threshold = j.value("decel_threshold", c->decel_threshold);
  c->lat_acc_threshold = j.value("lat_acc_threshold", c->lat_acc_threshold);
  c->headway_reaction_time = j.value("headway_reaction_time", c->headway_reaction_time);
  c->sdv_brake_decel = j.value("sdv_brake_decel", c->sdv_brake_decel);
  c->lead_brake_decel = j.value("lead_brake_decel", c->lead_brake_decel);
  c->dead_end_threshold = j.value("dead_end_threshold", c->dead_end_threshold);
  c->cost_to_go_lookahead = j.value("cost_to_go_lookahead", c->cost_to_go_lookahead);
  c->vehicle.length = j.value("vehicle_length", c->vehicle.length);
  c->vehicle.width = j.value("vehicle_width", c->vehicle.width);
  c->vehicle.rear_axle_offset = j.value("vehicle_rear_axle_offset",
                                        c->vehicle.rear_axle_offset);
  RequireRange(c->lambda >= 0.0, "costs.lambda");
  RequireRange(c->vehicle.length > 0.0 && c->vehicle.width > 0.0, "vehicle dims");
  RequireRange(c->sdv_brake_decel > 0.0 && c->lead_brake_decel > 0.0,
               "headway decelerations");
}

void ParseProducer(const json& j, ProducerParams* p) {
  RejectUnknownKeys(j, {"sigma0", "sigma1", "p_occ"}, "producer");
  p->sigma0 = j.value("sigma0", p->sigma0);
  p->sigma1 = j.value("sigma1", p->sigma1);
  p->p_occ = j.value("p_occ", p->p_occ);
  RequireRange(p->sigma0 >= 0.0 && p->sigma1 >= 0.0, "producer sigmas");
  RequireRange(p->p_occ >= 0.0 && p->p_occ <= 1.0, "producer.p_occ");
}

void ParseLearner(const json& j, TrainConfig* c) {
  RejectUnknownKeys(j,
                    {"alpha", "epochs", "batch_size", "seed", "initial_weight",
                     "divergence_epochs", "divergence_factor", "plateau_patience",
                     "plateau_rel_eps"},
                    "learner");
  c->alpha = j.value("alpha", c->alpha);
  c->epochs = j.value("epochs", c->epochs);
  c->batch_size = j.value("batch_size", c->batch_size);
  c->seed = j.value("seed", c->seed);
  c->initial_weight = j.value("initial_weight", c->initial_weight);
  c->divergence_epochs = j.value("divergence_epochs", c->divergence_epochs);
  c->divergence_factor = j.value("divergence_factor", c->divergence_factor);
  c->plateau_patience = j.value("plateau_patience", c->plateau_patience);
  c->plateau_rel_eps = j.value("plateau_rel_eps", c->plateau_rel_eps);
  RequireRange(c->alpha >= 0.0, "learner.alpha");
  RequireRange(c->epochs >= 1 && c->epochs <= 100000, "learner.epochs");
  RequireRange(c->batch_size >= 1, "learner.batch_size");
  RequireRange(c->initial_weight > 0.0, "learner.initial_weight");
}

void ParseSimulator(const json& j, SimConfig* c) {
  RejectUnknownKeys(j, {"step", "duration", "emergency_decel"}, "simulator");
  c->step = j.value("step", c->step);
  c->duration = j.value("duration", c->duration);
  c->emergency_decel = j.value("emergency_decel", c->emergency_decel);
  RequireRange(c->step > 0.0 && c->step <= 1.0, "simulator.step");
  RequireRange(c->duration > 0.0 && c->duration <= 600.0, "simulator.duration");
  RequireRange(c->emergency_decel > 0.0, "simulator.emergency_decel");
}

}  // namespace

RunConfig ParseRunConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config parse error: ") + e.what());
  }
  RejectUnknownKeys(root, {"sampler", "costs", "producer", "learner", "simulator"},
                    "<root>");
  RunConfig config;
  if (root.contains("sampler")) ParseSampler(root.at("sampler"), &config.sampler);
  if (root.contains("costs")) ParseCosts(root.at("costs"), &config.costs);
  if (root.contains("producer")) ParseProducer(root.at("producer"), &config.producer);
  if (root.contains("learner")) ParseLearner(root.at("learner"), &config.learner);
  if (root.contains("simulator")) ParseSimulator(root.at("simulator"), &config.simulator);
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  return ParseRunConfig(ReadTextFile(path));
}

std::string SerializeRunConfig(const RunConfig& c) {
  json root;
  root["sampler"] = {{"horizon", c.sampler.horizon},
                     {"dt", c.sampler.dt},
                     {"t1_values", c.sampler.t1_values},
                     {"lateral_offsets", c.sampler.lateral_offsets},
                     {"s1_times", c.sampler.s1_times},
                     {"extra_speed", c.sampler.extra_speed},
                     {"fixed_speed_targets", c.sampler.fixed_speed_targets},
                     {"a_max", c.sampler.a_max},
                     {"a_min", c.sampler.a_min},
                     {"kappa_max", c.sampler.kappa_max},
                     {"include_neighbor_lanes", c.sampler.include_neighbor_lanes},
                     {"chain_length", c.sampler.chain_length}};
  root["costs"] = {{"lambda", c.costs.lambda},
                   {"jerk_threshold", c.costs.jerk_threshold},
                   {"accel_threshold", c.costs.accel_threshold},
                   {"decel_threshold", c.costs.decel_threshold},
                   {"lat_acc_threshold", c.costs.lat_acc_threshold},
                   {"headway_reaction_time", c.costs.headway_reaction_time},
                   {"sdv_brake_decel", c.costs.sdv_brake_decel},
                   {"lead_brake_decel", c.costs.lead_brake_decel},
                   {"dead_end_threshold", c.costs.dead_end_threshold},
                   {"cost_to_go_lookahead", c.costs.cost_to_go_lookahead},
                   {"vehicle_length", c.costs.vehicle.length},
                   {"vehicle_width", c.costs.vehicle.width},
                   {"vehicle_rear_axle_offset", c.costs.vehicle.rear_axle_offset}};
  root["producer"] = {{"sigma0", c.producer.sigma0},
                      {"sigma1", c.producer.sigma1},
                      {"p_occ", c.producer.p_occ}};
  root["learner"] = {{"alpha", c.learner.alpha},
                     {"epochs", c.learner.epochs},
                     {"batch_size", c.learner.batch_size},
                     {"seed", c.learner.seed},
                     {"initial_weight", c.learner.initial_weight},
                     {"divergence_epochs", c.learner.divergence_epochs},
                     {"divergence_factor", c.learner.divergence_factor},
                     {"plateau_patience", c.learner.plateau_patience},
                     {"plateau_rel_eps", c.learner.plateau_rel_eps}};
  root["simulator"] = {{"step", c.simulator.step},
                       {"duration", c.simulator.duration},
                       {"emergency_decel", c.simulator.emergency_decel}};
  return root.dump(2) + "\n";
}

uint64_t ConfigHash(const RunConfig& config) {
  const std::string text = SerializeRunConfig(config);
  uint64_t h = 1469598103934665603ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

void WriteManifest(const std::string& directory, const std::string& command,
                   const RunConfig& config, uint64_t seed) {
  json manifest;
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["config_hash"] = ConfigHash(config);
  manifest["seed"] = seed;
  WriteTextFile(directory + "/manifest.json", manifest.dump(2) + "\n");
}

}  // namespace ogp
