#include "stride/terrain_gen.hpp"

#include <cmath>
#include <random>

namespace stride {

const char* to_string(TerrainClass c) {
  switch (c) {
    case TerrainClass::Flat: return "flat";
    case TerrainClass::ModerateSlopes: return "moderate";
    case TerrainClass::LargeSlope: return "large_slope";
    case TerrainClass::UpDownHill: return "up_down_hill";
    case TerrainClass::VShape: return "v_shape";
  }
  return "?";
}

TerrainClass terrain_class_from_string(const std::string& name) {
  if (name == "flat") return TerrainClass::Flat;
  if (name == "moderate") return TerrainClass::ModerateSlopes;
  if (name == "large_slope") return TerrainClass::LargeSlope;
  if (name == "up_down_hill") return TerrainClass::UpDownHill;
  if (name == "v_shape") return TerrainClass::VShape;
  throw StructuralError("unknown terrain class: " + name);
}

namespace {

constexpr double kDeg = M_PI / 180.0;

ContactSurface tilted_patch(const Vec3& center, double half_len, double half_wid, double angle_rad,
                            const Vec3& axis, double mu) {
  const Eigen::AngleAxisd rot(angle_rad, axis);
  const Vec3 a1 = rot * Vec3(half_len, 0, 0);
  const Vec3 a2 = rot * Vec3(0, half_wid, 0);
  return ContactSurface::from_center_axes(center, a1, a2, mu);
}

}  // namespace

Terrain generate_terrain(TerrainClass cls, int length, std::uint64_t seed, const TerrainGenOptions& opt) {
  if (length < 1) throw StructuralError("terrain length must be >= 1 step");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> moderate(opt.moderate_min_deg, opt.moderate_max_deg);
  std::uniform_real_distribution<double> large(opt.large_min_deg, opt.large_max_deg);
  std::bernoulli_distribution coin(0.5);

  Terrain t;
  const double hl = opt.patch_length / 2.0;
  // flat start patches, one per foot
  const Vec3 start_half_width(0, opt.start_patch_width / 2.0, 0);
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, opt.start_offset, 0), Vec3(hl, 0, 0),
                                                        start_half_width, opt.friction));
  t.surfaces.push_back(ContactSurface::from_center_axes(Vec3(0, -opt.start_offset, 0), Vec3(hl, 0, 0),
                                                        start_half_width, opt.friction));
  t.start_surfaces = {0, 1};

  const int large_index = length / 2;  // step carrying the steep block
  Foot swing = Foot::Left;
  for (int k = 0; k < length; ++k) {
    const double x = opt.first_step_x + opt.step_advance * k;
    const double y = (swing == Foot::Left ? 1.0 : -1.0) * opt.column_offset;
    double z = 0.0;
    double angle = 0.0;
    Vec3 axis = Vec3::UnitY();

    switch (cls) {
      case TerrainClass::Flat: break;
      case TerrainClass::ModerateSlopes: {
        angle = moderate(rng) * kDeg * (coin(rng) ? 1.0 : -1.0);
        axis = coin(rng) ? Vec3::UnitY() : Vec3::UnitX();
        break;
      }
      case TerrainClass::LargeSlope: {
        if (k == large_index) {
          angle = -large(rng) * kDeg;  // rising along +x
          axis = Vec3::UnitY();
        } else if (k == large_index - 1 || k == large_index + 1) {
          angle = 0.0;  // flat aprons keep the height discontinuity bounded
        } else {
          angle = moderate(rng) * kDeg * (coin(rng) ? 1.0 : -1.0);
          axis = coin(rng) ? Vec3::UnitY() : Vec3::UnitX();
        }
        break;
      }
      case TerrainClass::UpDownHill: {
        const int crest = length / 2;
        const double slope = std::tan(opt.hill_deg * kDeg);
        if (k < crest) {
          angle = -opt.hill_deg * kDeg;
          z = (k + 0.5) * opt.step_advance * slope;
        } else {
          angle = opt.hill_deg * kDeg;
          z = (length - 0.5 - k) * opt.step_advance * slope;
        }
        z = std::max(z, 0.0);
        break;
      }
      case TerrainClass::VShape: {
        const int valley = length / 2;
        const double slope = std::tan(opt.hill_deg * kDeg);
        if (k < valley) {
          angle = opt.hill_deg * kDeg;
          z = -(k + 0.5) * opt.step_advance * slope;
        } else {
          angle = -opt.hill_deg * kDeg;
          z = -(length - 0.5 - k) * opt.step_advance * slope;
        }
        z = std::min(z, 0.0);
        break;
      }
    }

    t.surfaces.push_back(tilted_patch(Vec3(x, y, z), hl, opt.patch_width / 2.0, angle, axis, opt.friction));
    t.step_sequence.push_back(static_cast<int>(t.surfaces.size()) - 1);
    swing = other(swing);
  }
  t.validate();
  return t;
}

double surface_inclination_deg(const ContactSurface& surface) {
  const double c = std::clamp(surface.unit_normal.dot(Vec3::UnitZ()), -1.0, 1.0);
  return std::acos(c) / kDeg;
}

double max_height_discontinuity(const Terrain& terrain) {
  double worst = 0.0;
  const auto plane_z = [](const ContactSurface& s, double x, double y) {
    // n.(p - v0) = 0 solved for z
    const Vec3& n = s.unit_normal;
    const Vec3& v = s.vertices[0];
    return v.z() + (n.x() * (v.x() - x) + n.y() * (v.y() - y)) / n.z();
  };
  for (std::size_t i = 1; i < terrain.step_sequence.size(); ++i) {
    const ContactSurface& a = terrain.surface(terrain.step_sequence[i - 1]);
    const ContactSurface& b = terrain.surface(terrain.step_sequence[i]);
    const Vec3 mid = 0.5 * (a.center() + b.center());
    worst = std::max(worst, std::abs(plane_z(a, mid.x(), mid.y()) - plane_z(b, mid.x(), mid.y())));
  }
  return worst;
}

}  // namespace stride
