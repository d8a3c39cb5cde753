#pragma once

#include <map>
#include <string>

#include "ogp/world.hpp"

namespace ogp {

// Scenario file format (JSON, all SI units: m, m/s, rad, s). See
// docs/formats.md. Loading validates the scenario and rejects invalid
// files; saving emits canonical JSON so load -> save is byte-stable.
Scenario LoadScenario(const std::string& path);
Scenario ParseScenario(const std::string& json_text);
std::string SerializeScenario(const Scenario& scenario);
void SaveScenario(const Scenario& scenario, const std::string& path);

// Versioned named weight map.
std::map<std::string, double> LoadWeightsFile(const std::string& path);
void SaveWeightsFile(const std::map<std::string, double>& weights,
                     const std::string& path);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace ogp
