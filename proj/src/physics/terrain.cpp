#include "solo9/physics/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "solo9/core/rng.hpp"

namespace solo9 {

Terrain Terrain::generate(TerrainKind kind, const TerrainParams& params, uint64_t seed) {
  Terrain t;
  t.kind_ = kind;
  t.params_ = params;
  if (kind == TerrainKind::flat) return t;

  if (kind == TerrainKind::uneven && params.amplitude <= 0.0)
    throw ValidationError("uneven terrain requires amplitude > 0");
  if (kind == TerrainKind::steps) {
    if (params.step_heights.empty())
      throw ValidationError("steps terrain requires a non-empty step height set");
    for (double h : params.step_heights)
      if (h <= 0.0) throw ValidationError("step heights must be > 0");
  }

  t.nx_ = std::max(1, static_cast<int>(std::round(params.extent / params.cell)));
  t.ny_ = t.nx_;
  t.x0_ = -0.5 * t.nx_ * params.cell;
  t.y0_ = -0.5 * t.ny_ * params.cell;
  t.heights_.assign(static_cast<size_t>(t.nx_) * t.ny_, 0.0);

  Rng rng(seed);
  if (kind == TerrainKind::uneven) {
    for (auto& h : t.heights_) h = rng.uniform(-params.amplitude, params.amplitude);
  } else {
    // Concentric square plateaus rising away from the spawn area by a fixed
    // per-ring step, with jittered ring boundaries to make edges irregular.
    int pick = rng.uniform_int(0, static_cast<int>(params.step_heights.size()) - 1);
    t.step_rise_ = params.step_heights[static_cast<size_t>(pick)];
    for (int iy = 0; iy < t.ny_; ++iy) {
      for (int ix = 0; ix < t.nx_; ++ix) {
        double cx = t.x0_ + (ix + 0.5) * params.cell;
        double cy = t.y0_ + (iy + 0.5) * params.cell;
        double d = std::max(std::abs(cx), std::abs(cy)) - params.spawn_radius;
        // Deterministic per-cell jitter, independent of visit order.
        Rng cell_rng(seed ^ (static_cast<uint64_t>(iy) * 0x9e3779b9ull + ix));
        d += cell_rng.uniform(-0.3, 0.3) * params.ring_width;
        int ring = d <= 0.0 ? 0 : 1 + static_cast<int>(d / params.ring_width);
        t.heights_[static_cast<size_t>(iy) * t.nx_ + ix] = ring * t.step_rise_;
      }
    }
  }
  return t;
}

double Terrain::height_at(double x, double y) const {
  if (kind_ == TerrainKind::flat || heights_.empty()) return 0.0;
  int ix = static_cast<int>(std::floor((x - x0_) / params_.cell));
  int iy = static_cast<int>(std::floor((y - y0_) / params_.cell));
  if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return 0.0;
  return heights_[static_cast<size_t>(iy) * nx_ + ix];
}

double Terrain::max_height() const {
  if (heights_.empty()) return 0.0;
  return *std::max_element(heights_.begin(), heights_.end());
}

}  // namespace solo9
