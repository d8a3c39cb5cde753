#include "ogp/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ogp {

using nlohmann::json;

namespace {

constexpr int kWeightsSchemaVersion = 1;

RootClass RootClassFromString(const std::string& s) {
  if (s == "vehicle") return RootClass::kVehicle;
  if (s == "pedestrian") return RootClass::kPedestrian;
  if (s == "bike") return RootClass::kBike;
  throw InvalidInputError("unknown actor class '" + s + "'");
}

ControlKind ControlKindFromString(const std::string& s) {
  if (s == "stop_sign") return ControlKind::kStopSign;
  if (s == "traffic_light") return ControlKind::kTrafficLight;
  if (s == "speed_limit_change") return ControlKind::kSpeedLimitChange;
  throw InvalidInputError("unknown control kind '" + s + "'");
}

const char* ToString(ControlKind k) {
  switch (k) {
    case ControlKind::kStopSign: return "stop_sign";
    case ControlKind::kTrafficLight: return "traffic_light";
    case ControlKind::kSpeedLimitChange: return "speed_limit_change";
  }
  return "?";
}

LightState LightFromString(const std::string& s) {
  if (s == "green") return LightState::kGreen;
  if (s == "yellow") return LightState::kYellow;
  if (s == "red") return LightState::kRed;
  throw InvalidInputError("unknown light state '" + s + "'");
}

const char* ToString(LightState s) {
  switch (s) {
    case LightState::kGreen: return "green";
    case LightState::kYellow: return "yellow";
    case LightState::kRed: return "red";
  }
  return "?";
}

BicycleState StateFromArray(const json& a) {
  if (!a.is_array() || a.size() != 6) {
    throw InvalidInputError("state entries must be [x,y,theta,v,kappa,a]");
  }
  BicycleState b;
  b.x = a[0];
  b.y = a[1];
  b.theta = a[2];
  b.v = a[3];
  b.kappa = a[4];
  b.a = a[5];
  return b;
}

json StateToArray(const BicycleState& b) {
  return json::array({b.x, b.y, b.theta, b.v, b.kappa, b.a});
}

}  // namespace

Scenario ParseScenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("scenario parse error: ") + e.what());
  }

  Scenario sc;
  try {
    for (const json& jl : root.at("map").at("lanes")) {
      Lane lane;
      lane.id = jl.at("id");
      for (const json& p : jl.at("centerline")) {
        lane.raw_centerline.push_back({p.at(0), p.at(1)});
      }
      lane.centerline = DrivingPath::FromPolyline(lane.raw_centerline);
      lane.width = jl.at("width");
      lane.speed_limit = jl.at("speed_limit");
      if (jl.contains("left")) lane.left_neighbor = jl.at("left").get<int>();
      if (jl.contains("right")) lane.right_neighbor = jl.at("right").get<int>();
      if (jl.contains("successors")) {
        lane.successors = jl.at("successors").get<std::vector<int>>();
      }
      lane.left_crossable = jl.value("left_crossable", lane.left_neighbor.has_value());
      lane.right_crossable = jl.value("right_crossable", lane.right_neighbor.has_value());
      sc.map.Add(std::move(lane));
    }
    sc.route.lane_ids = root.at("route").get<std::vector<int>>();
    if (root.contains("controls")) {
      for (const json& jc : root.at("controls")) {
        TrafficControl control;
        control.kind = ControlKindFromString(jc.at("kind"));
        control.lane_id = jc.at("lane");
        control.s_stop = jc.at("s_stop");
        control.limit = jc.value("limit", 0.0);
        if (jc.contains("schedule")) {
          for (const json& entry : jc.at("schedule")) {
            control.schedule.emplace_back(entry.at(0).get<double>(),
                                          LightFromString(entry.at(1)));
          }
        }
        sc.controls.push_back(std::move(control));
      }
    }
    if (root.contains("actors")) {
      for (const json& ja : root.at("actors")) {
        Actor actor;
        actor.id = ja.at("id");
        actor.root = RootClassFromString(ja.at("class"));
        actor.length = ja.at("length");
        actor.width = ja.at("width");
        actor.compliant = ja.value("compliant", true);
        for (const json& w : ja.at("trajectory")) {
          actor.waypoints.push_back({w.at(0), w.at(1), w.at(2), w.at(3), w.at(4)});
        }
        sc.actors.push_back(std::move(actor));
      }
    }
    const json& jsdv = root.at("sdv");
    sc.sdv.x = jsdv.at("x");
    sc.sdv.y = jsdv.at("y");
    sc.sdv.theta = jsdv.at("theta");
    sc.sdv.v = jsdv.at("v");
    sc.sdv.kappa = jsdv.value("kappa", 0.0);
    sc.sdv.a = jsdv.value("a", 0.0);
    if (root.contains("expert")) {
      for (const json& e : root.at("expert")) sc.expert.push_back(StateFromArray(e));
    }
    sc.duration = root.at("duration");
    sc.seed = root.value("seed", 0ULL);
    sc.name = root.value("name", std::string());
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("scenario field error: ") + e.what());
  }

  sc.Validate();
  return sc;
}

std::string SerializeScenario(const Scenario& sc) {
  json root;
  json lanes = json::array();
  for (const Lane& lane : sc.map.lanes()) {
    json jl;
    jl["id"] = lane.id;
    json pts = json::array();
    for (const Vec2& p : lane.raw_centerline) pts.push_back(json::array({p.x, p.y}));
    jl["centerline"] = pts;
    jl["width"] = lane.width;
    jl["speed_limit"] = lane.speed_limit;
    if (lane.left_neighbor) jl["left"] = *lane.left_neighbor;
    if (lane.right_neighbor) jl["right"] = *lane.right_neighbor;
    if (!lane.successors.empty()) jl["successors"] = lane.successors;
    jl["left_crossable"] = lane.left_crossable;
    jl["right_crossable"] = lane.right_crossable;
    lanes.push_back(std::move(jl));
  }
  root["map"]["lanes"] = lanes;
  root["route"] = sc.route.lane_ids;
  if (!sc.controls.empty()) {
    json controls = json::array();
    for (const TrafficControl& control : sc.controls) {
      json jc;
      jc["kind"] = ToString(control.kind);
      jc["lane"] = control.lane_id;
      jc["s_stop"] = control.s_stop;
      if (control.kind == ControlKind::kSpeedLimitChange) jc["limit"] = control.limit;
      if (!control.schedule.empty()) {
        json schedule = json::array();
        for (const auto& [t, state] : control.schedule) {
          schedule.push_back(json::array({t, ToString(state)}));
        }
        jc["schedule"] = schedule;
      }
      controls.push_back(std::move(jc));
    }
    root["controls"] = controls;
  }
  if (!sc.actors.empty()) {
    json actors = json::array();
    for (const Actor& actor : sc.actors) {
      json ja;
      ja["id"] = actor.id;
      ja["class"] = ToString(actor.root);
      ja["length"] = actor.length;
      ja["width"] = actor.width;
      ja["compliant"] = actor.compliant;
      json tr = json::array();
      for (const ActorWaypoint& w : actor.waypoints) {
        tr.push_back(json::array({w.t, w.x, w.y, w.theta, w.v}));
      }
      ja["trajectory"] = tr;
      actors.push_back(std::move(ja));
    }
    root["actors"] = actors;
  }
  root["sdv"] = {{"x", sc.sdv.x},     {"y", sc.sdv.y}, {"theta", sc.sdv.theta},
                 {"v", sc.sdv.v},     {"kappa", sc.sdv.kappa},
                 {"a", sc.sdv.a}};
  if (!sc.expert.empty()) {
    json expert = json::array();
    for (const BicycleState& b : sc.expert) expert.push_back(StateToArray(b));
    root["expert"] = expert;
  }
  root["duration"] = sc.duration;
  root["seed"] = sc.seed;
  if (!sc.name.empty()) root["name"] = sc.name;
  return root.dump(2) + "\n";
}

Scenario LoadScenario(const std::string& path) {
  return ParseScenario(ReadTextFile(path));
}

void SaveScenario(const Scenario& scenario, const std::string& path) {
  WriteTextFile(path, SerializeScenario(scenario));
}

std::map<std::string, double> LoadWeightsFile(const std::string& path) {
  json root;
  try {
    root = json::parse(ReadTextFile(path));
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("weights parse error: ") + e.what());
  }
  if (root.value("version", 0) != kWeightsSchemaVersion) {
    throw InvalidInputError("unsupported weights schema version");
  }
  std::map<std::string, double> weights;
  for (const auto& [name, value] : root.at("weights").items()) {
    weights[name] = value;
  }
  return weights;
}

void SaveWeightsFile(const std::map<std::string, double>& weights,
                     const std::string& path) {
  json root;
  root["version"] = kWeightsSchemaVersion;
  root["weights"] = weights;
  WriteTextFile(path, root.dump(2) + "\n");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write file: " + path);
  out << content;
}

}  // namespace ogp
