#include "stride/terrain_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace stride {

using nlohmann::json;

Terrain load_terrain(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("terrain parse error: ") + e.what());
  }
  Terrain t;
  try {
    for (const auto& js : j.at("surfaces")) {
      std::array<Vec3, 4> verts;
      const auto& jv = js.at("vertices");
      if (jv.size() != 4) throw StructuralError("terrain surface must have 4 vertices");
      for (int i = 0; i < 4; ++i)
        verts[i] = Vec3(jv[i].at(0).get<double>(), jv[i].at(1).get<double>(), jv[i].at(2).get<double>());
      t.surfaces.push_back(ContactSurface::from_vertices(verts, js.value("mu", 0.5)));
    }
    t.start_surfaces = {j.at("start").at(0).get<int>(), j.at("start").at(1).get<int>()};
    for (const auto& s : j.at("steps")) t.step_sequence.push_back(s.get<int>());
  } catch (const json::exception& e) {
    throw StructuralError(std::string("terrain schema error: ") + e.what());
  }
  t.validate();
  return t;
}

Terrain load_terrain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open terrain file: " + path);
  return load_terrain(in);
}

std::string terrain_to_json(const Terrain& terrain) {
  json j;
  j["surfaces"] = json::array();
  for (const ContactSurface& s : terrain.surfaces) {
    json js;
    js["vertices"] = json::array();
    for (const Vec3& v : s.vertices) js["vertices"].push_back({v.x(), v.y(), v.z()});
    js["mu"] = s.friction;
    j["surfaces"].push_back(js);
  }
  j["start"] = {terrain.start_surfaces.first, terrain.start_surfaces.second};
  j["steps"] = terrain.step_sequence;
  return j.dump(2);
}

void save_terrain_file(const Terrain& terrain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write terrain file: " + path);
  out << terrain_to_json(terrain) << "\n";
}

}  // namespace stride
