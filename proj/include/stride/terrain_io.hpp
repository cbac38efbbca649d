#pragma once

#include "stride/geometry.hpp"

#include <iosfwd>
#include <string>

namespace stride {

// Terrain file format:
//   {"surfaces": [{"vertices": [[x,y,z] x4], "mu": 0.5}, ...],
//    "start": [left_idx, right_idx],
//    "steps": [idx, ...]}
// Lengths in meters.

Terrain load_terrain(std::istream& in);
Terrain load_terrain_file(const std::string& path);
std::string terrain_to_json(const Terrain& terrain);
void save_terrain_file(const Terrain& terrain, const std::string& path);

}  // namespace stride
