#pragma once

#include "stride/geometry.hpp"

#include <cstdint>
#include <string>

namespace stride {

enum class TerrainClass { Flat, ModerateSlopes, LargeSlope, UpDownHill, VShape };
const char* to_string(TerrainClass c);
TerrainClass terrain_class_from_string(const std::string& name);

struct TerrainGenOptions {
  double patch_length = 0.4;        // sagittal footprint
  double patch_width = 0.3;         // lateral footprint of step patches
  double start_patch_width = 0.25;
  double column_offset = 0.175;     // lateral distance of step columns from the centerline
  double start_offset = 0.15;       // lateral distance of the start feet
  double first_step_x = 0.45;       // keeps a 0.05 m gap behind the start patches
  double step_advance = 0.25;
  double moderate_min_deg = 5.0;
  double moderate_max_deg = 12.0;
  double large_min_deg = 17.0;
  double large_max_deg = 25.0;
  double hill_deg = 10.0;  // up-and-down hill and v-shape inclination
  double friction = 0.5;
};

/// Deterministic per seed. Surfaces: [left start, right start, step 1..n];
/// the step sequence alternates columns starting with the left foot.
Terrain generate_terrain(TerrainClass cls, int length, std::uint64_t seed,
                         const TerrainGenOptions& options = {});

/// Angle between the surface normal and the world vertical, in degrees.
double surface_inclination_deg(const ContactSurface& surface);

/// Largest plane-height mismatch between consecutive step patches, evaluated
/// midway between their centers.
double max_height_discontinuity(const Terrain& terrain);

}  // namespace stride
