#pragma once

#include <cstdint>
#include <vector>

#include "solo9/core/types.hpp"

namespace solo9 {

enum class TerrainKind { flat, uneven, steps };

struct TerrainParams {
  double amplitude = 0.0;             // uneven: heights drawn uniform in [-a, a]
  std::vector<double> step_heights;   // steps: per-ring rise drawn from this set
  double cell = 0.05;                 // m
  double extent = 8.0;                // field spans [-extent/2, extent/2] in x and y
  double ring_width = 0.6;            // steps: plateau width
  double spawn_radius = 0.8;          // steps: flat area around the origin
};

/// Piecewise-constant heightfield. Cells are plateaus (no interpolation),
/// queries outside the field return flat-ground height 0.
class Terrain {
 public:
  Terrain() = default;  // flat

  static Terrain generate(TerrainKind kind, const TerrainParams& params, uint64_t seed);

  double height_at(double x, double y) const;
  TerrainKind kind() const { return kind_; }
  const TerrainParams& params() const { return params_; }
  /// The rise between neighboring plateaus (steps terrain only).
  double step_rise() const { return step_rise_; }
  double max_height() const;

 private:
  TerrainKind kind_ = TerrainKind::flat;
  TerrainParams params_;
  int nx_ = 0, ny_ = 0;
  double x0_ = 0, y0_ = 0;
  std::vector<double> heights_;  // row-major [iy * nx + ix]
  double step_rise_ = 0.0;
};

}  // namespace solo9
