#pragma once

#include "solo9/core/rng.hpp"
#include "solo9/core/types.hpp"

namespace solo9 {

/// Per-env difficulty: terrain height level and PD-gain level move in
/// lockstep, each clamped to its own maximum.
struct CurriculumState {
  int terrain_level = 0;
  int pd_gain_level = 0;
  double walked_distance = 0.0;  // accumulator, m
};

/// Walking far enough promotes, covering less than half the target demotes
/// (floor 0), and a promotion past the top level reshuffles the env to a
/// uniformly random level.
inline CurriculumState curriculum_update(const CurriculumState& cs, double walked, double target,
                                         int max_level, Rng& rng) {
  if (walked < 0 || target < 0) throw ValidationError("curriculum distances must be >= 0");
  CurriculumState out = cs;
  out.walked_distance = 0.0;
  int delta = 0;
  if (walked >= target)
    delta = 1;
  else if (walked < 0.5 * target)
    delta = -1;
  auto apply = [&](int level) {
    int next = level + delta;
    if (next > max_level) return rng.uniform_int(0, max_level);
    return std::max(0, next);
  };
  // One draw shared by both tracks so they stay in lockstep.
  if (cs.terrain_level + delta > max_level) {
    int reshuffled = rng.uniform_int(0, max_level);
    out.terrain_level = reshuffled;
    out.pd_gain_level = std::min(reshuffled, max_level);
  } else {
    out.terrain_level = apply(cs.terrain_level);
    out.pd_gain_level = std::max(0, std::min(cs.pd_gain_level + delta, max_level));
  }
  return out;
}

}  // namespace solo9
