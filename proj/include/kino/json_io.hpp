#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kino/trajectory.hpp"
#include "kino/world.hpp"

namespace kino {

using nlohmann::json;

namespace detail {

inline const json& require_field(const json& j, const char* key,
                                 const char* what) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing field '" +
                                key + "'");
  return j.at(key);
}

inline Interval interval_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument(std::string(what) +
                                ": expected [lo, hi] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline json scene_to_json(const Scene& scene) {
  json j;
  j["n_dims"] = scene.dims();
  auto pairs = [](const auto& v, auto f) {
    json arr = json::array();
    for (const auto& x : v) arr.push_back(f(x));
    return arr;
  };
  j["q_bounds"] =
      pairs(scene.q_bounds, [](const Interval& b) { return json{b.lo, b.hi}; });
  j["v_bounds"] =
      pairs(scene.v_bounds, [](const Interval& b) { return json{b.lo, b.hi}; });
  j["accel_bounds"] = pairs(
      scene.accel, [](const AccelBounds& b) { return json{b.a_min, b.a_max}; });
  if (const auto* pt = std::get_if<PlanarPoint>(&scene.robot)) {
    j["robot"] = {{"type", "point"}, {"radius", pt->radius}};
  } else {
    const auto& c = std::get<PlanarChain>(scene.robot);
    j["robot"] = {{"type", "chain"},
                  {"links", c.links},
                  {"link_length", c.link_length},
                  {"base", {c.base.x, c.base.y}},
                  {"joint_limit", c.joint_limit}};
  }
  json obs = json::array();
  for (const auto& poly : scene.obstacles) {
    json p = json::array();
    for (const auto& v : poly) p.push_back({v.x, v.y});
    obs.push_back(p);
  }
  j["obstacles"] = obs;
  j["resolution"] = scene.resolution;
  if (scene.chain_self_collision) j["chain_self_collision"] = true;
  if (!scene.enforce_velocity_bounds) j["enforce_velocity_bounds"] = false;
  return j;
}

inline Scene scene_from_json(const json& j) {
  Scene scene;
  const std::size_t n =
      detail::require_field(j, "n_dims", "scene").get<std::size_t>();

  auto read_bounds = [&](const char* key, auto& out, auto convert) {
    const json& arr = detail::require_field(j, key, "scene");
    if (!arr.is_array() || arr.size() != n) {
      std::ostringstream msg;
      msg << "scene: field '" << key << "' must list " << n << " pairs";
      throw std::invalid_argument(msg.str());
    }
    for (const auto& item : arr) out.push_back(convert(item, key));
  };
  read_bounds("q_bounds", scene.q_bounds, [](const json& it, const char* k) {
    return detail::interval_from_json(it, k);
  });
  read_bounds("v_bounds", scene.v_bounds, [](const json& it, const char* k) {
    return detail::interval_from_json(it, k);
  });
  read_bounds("accel_bounds", scene.accel, [](const json& it, const char* k) {
    const Interval b = detail::interval_from_json(it, k);
    return AccelBounds{b.lo, b.hi};
  });

  const json& robot = detail::require_field(j, "robot", "scene");
  const std::string type =
      detail::require_field(robot, "type", "scene.robot").get<std::string>();
  if (type == "point") {
    PlanarPoint pt;
    if (robot.contains("radius")) pt.radius = robot["radius"].get<double>();
    if (pt.radius < 0.0)
      throw std::invalid_argument("scene.robot: negative radius");
    scene.robot = pt;
  } else if (type == "chain") {
    PlanarChain c;
    c.links = detail::require_field(robot, "links", "scene.robot").get<int>();
    c.link_length =
        detail::require_field(robot, "link_length", "scene.robot")
            .get<double>();
    if (robot.contains("base")) {
      const json& b = robot["base"];
      c.base = {b.at(0).get<double>(), b.at(1).get<double>()};
    }
    if (robot.contains("joint_limit"))
      c.joint_limit = robot["joint_limit"].get<double>();
    scene.robot = c;
  } else {
    throw std::invalid_argument("scene.robot: unknown type '" + type + "'");
  }

  if (j.contains("obstacles")) {
    for (const auto& poly_json : j["obstacles"]) {
      Polygon poly;
      for (const auto& v : poly_json)
        poly.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      scene.obstacles.push_back(std::move(poly));
    }
  }
  if (j.contains("resolution"))
    scene.resolution = j["resolution"].get<double>();
  else if (std::holds_alternative<PlanarChain>(scene.robot))
    scene.resolution = 0.05;  // joint-space default
  if (j.contains("chain_self_collision"))
    scene.chain_self_collision = j["chain_self_collision"].get<bool>();
  if (j.contains("enforce_velocity_bounds"))
    scene.enforce_velocity_bounds = j["enforce_velocity_bounds"].get<bool>();

  scene.validate();
  return scene;
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scene file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scene parse error in " + path + ": " +
                                e.what());
  }
  try {
    return scene_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("scene validation error in " + path + ": " +
                                e.what());
  }
}

inline json trajectory_to_json(const TrajectoryN& traj) {
  json j;
  j["x0"] = {{"q", traj.x0.q}, {"qd", traj.x0.qd}};
  json axes = json::array();
  for (const auto& axis : traj.axes) {
    json segs = json::array();
    for (const auto& s : axis.normalized().segments)
      segs.push_back({{"a", s.accel}, {"dt", s.duration}});
    axes.push_back(segs);
  }
  j["axes"] = axes;
  j["duration"] = traj.duration;
  return j;
}

inline TrajectoryN trajectory_from_json(const json& j) {
  TrajectoryN traj;
  const json& x0 = detail::require_field(j, "x0", "trajectory");
  traj.x0.q = detail::require_field(x0, "q", "trajectory.x0")
                  .get<std::vector<double>>();
  traj.x0.qd = detail::require_field(x0, "qd", "trajectory.x0")
                   .get<std::vector<double>>();
  for (const auto& axis_json :
       detail::require_field(j, "axes", "trajectory")) {
    PiecewiseControl1 axis;
    for (const auto& s : axis_json)
      axis.segments.push_back(
          {s.at("a").get<double>(), s.at("dt").get<double>()});
    traj.axes.push_back(std::move(axis));
  }
  traj.duration = detail::require_field(j, "duration", "trajectory")
                      .get<double>();
  if (traj.axes.size() != traj.x0.dims())
    throw std::invalid_argument("trajectory: axes/x0 dimension mismatch");
  for (const auto& axis : traj.axes)
    if (std::abs(axis.duration() - traj.duration) > 1e-6)
      throw std::invalid_argument(
          "trajectory: axis durations disagree with total duration");
  return traj;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace kino
