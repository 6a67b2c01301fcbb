#ifndef ARCBEM_SCENE_IO_HPP
#define ARCBEM_SCENE_IO_HPP

// JSON scene serialization.  Schema (version 1):
// {
//   "version": 1,
//   "medium": {"lambda": 2.0, "mu": 1.0, "rho": 1.0, "omega": 50.0},
//   "arcs": [
//     {"kind": "line", "a": [x,y], "b": [x,y]},
//     {"kind": "circular", "center": [x,y], "radius": r,
//      "angle_start": t0, "angle_end": t1},
//     {"kind": "spiral", "scale": s, "rate": k},
//     {"kind": "sine", "a": .., "b": .., "c": .., "d": .., "beta": ..,
//      "gamma": ..}
//   ]
// }

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "arcbem/geometry.hpp"

namespace arcbem {

inline constexpr int scene_schema_version = 1;

class SceneFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Vector2d read_vec2(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SceneFormatError(where + ": expected [x, y]");
  return Vector2d(j[0].get<double>(), j[1].get<double>());
}

inline double read_num(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw SceneFormatError(where + ": missing numeric field '" + key + "'");
  return j[key].get<double>();
}

}  // namespace detail

inline nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json j;
  j["version"] = scene_schema_version;
  j["medium"] = {{"lambda", scene.medium.lambda},
                 {"mu", scene.medium.mu},
                 {"rho", scene.medium.rho},
                 {"omega", scene.medium.omega}};
  j["arcs"] = nlohmann::json::array();
  for (const auto& arc : scene.arcs) {
    nlohmann::json a;
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, LineArc>) {
            a = {{"kind", "line"}, {"a", {s.a.x(), s.a.y()}}, {"b", {s.b.x(), s.b.y()}}};
          } else if constexpr (std::is_same_v<S, CircularArc>) {
            a = {{"kind", "circular"},
                 {"center", {s.center.x(), s.center.y()}},
                 {"radius", s.radius},
                 {"angle_start", s.angle_start},
                 {"angle_end", s.angle_end}};
          } else if constexpr (std::is_same_v<S, SpiralArc>) {
            a = {{"kind", "spiral"}, {"scale", s.scale}, {"rate", s.rate}};
          } else {
            a = {{"kind", "sine"}, {"a", s.a},       {"b", s.b},
                 {"c", s.c},       {"d", s.d},       {"beta", s.beta},
                 {"gamma", s.gamma}};
          }
        },
        arc.shape());
    j["arcs"].push_back(std::move(a));
  }
  return j;
}

inline Scene scene_from_json(const nlohmann::json& j) {
  if (!j.contains("version")) throw SceneFormatError("scene: missing 'version' field");
  if (j["version"].get<int>() != scene_schema_version)
    throw SceneFormatError("scene: unsupported version " + j["version"].dump());
  Scene scene;
  if (j.contains("medium")) {
    const auto& m = j["medium"];
    scene.medium.lambda = detail::read_num(m, "lambda", "medium");
    scene.medium.mu = detail::read_num(m, "mu", "medium");
    scene.medium.rho = detail::read_num(m, "rho", "medium");
    scene.medium.omega = detail::read_num(m, "omega", "medium");
  }
  scene.medium.validate();
  if (!j.contains("arcs") || !j["arcs"].is_array())
    throw SceneFormatError("scene: missing 'arcs' array");
  int idx = 0;
  for (const auto& a : j["arcs"]) {
    const std::string where = "arcs[" + std::to_string(idx++) + "]";
    if (!a.contains("kind") || !a["kind"].is_string())
      throw SceneFormatError(where + ": missing 'kind'");
    const std::string kind = a["kind"].get<std::string>();
    if (kind == "line") {
      if (!a.contains("a") || !a.contains("b"))
        throw SceneFormatError(where + ": line needs 'a' and 'b'");
      scene.arcs.emplace_back(ArcGeometry::Shape{LineArc{
          detail::read_vec2(a["a"], where + ".a"), detail::read_vec2(a["b"], where + ".b")}});
    } else if (kind == "circular") {
      if (!a.contains("center")) throw SceneFormatError(where + ": circular needs 'center'");
      scene.arcs.emplace_back(ArcGeometry::Shape{
          CircularArc{detail::read_vec2(a["center"], where + ".center"),
                      detail::read_num(a, "radius", where), detail::read_num(a, "angle_start", where),
                      detail::read_num(a, "angle_end", where)}});
    } else if (kind == "spiral") {
      scene.arcs.emplace_back(ArcGeometry::Shape{
          SpiralArc{detail::read_num(a, "scale", where), detail::read_num(a, "rate", where)}});
    } else if (kind == "sine") {
      scene.arcs.emplace_back(ArcGeometry::Shape{SineArc{
          detail::read_num(a, "a", where), detail::read_num(a, "b", where),
          detail::read_num(a, "c", where), detail::read_num(a, "d", where),
          detail::read_num(a, "beta", where), detail::read_num(a, "gamma", where)}});
    } else {
      throw SceneFormatError(where + ": unknown kind '" + kind + "'");
    }
  }
  return scene;
}

inline void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scene: cannot open " + path);
  out << scene_to_json(scene).dump(2) << "\n";
}

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scene: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SceneFormatError(std::string("load_scene: ") + e.what());
  }
  return scene_from_json(j);
}

}  // namespace arcbem

#endif  // ARCBEM_SCENE_IO_HPP
