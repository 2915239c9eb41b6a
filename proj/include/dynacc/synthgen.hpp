#pragma once

#include <cstdint>
#include <vector>

#include "dynacc/network.hpp"
#include "dynacc/zoning.hpp"

namespace dynacc {

/// One Gaussian speed dip: speeds drop to (1 - depth) at the center instant
/// and recover over roughly +-2 half-widths.
struct CongestionDip {
  double depth = 0.0;             // in [0, 1)
  double center_minute = 480.0;   // 08:00
  double half_width_minutes = 50.0;
};

/// Deterministic ring-radial test city. Inbound radials congest in the
/// morning, outbound radials in the afternoon, ring roads get both dips
/// attenuated; all dips deepen linearly with distance from the center, so
/// congestion rolls from the periphery toward downtown like the real thing.
struct SynthSpec {
  int rings = 8;
  int radials = 12;
  double ring_spacing_km = 3.25;
  double core_population = 100.0;      // population scale; the center 1 km2
                                       // cell gets 1000x this many inhabitants
  double density_decay_per_km = 0.13;  // exponential decline of density
  CongestionDip morning_dip{0.45, 480.0, 50.0};
  CongestionDip afternoon_dip{0.50, 1035.0, 65.0};
  double direction_asymmetry = 0.85;   // 1 = dips fully directional
  std::uint64_t seed = 1;
};

/// Everything a scenario needs, in the exact shapes the ingest layer reads.
struct SynthCity {
  std::vector<Node> nodes;
  std::vector<SpeedProfile> profiles;
  std::vector<Link> links;
  std::vector<TurnRestriction> restrictions;  // none are generated
  std::vector<RasterCell> raster;
  BoundingBox study_extent;
  double downtown_x = 0.0;
  double downtown_y = 0.0;
};

SynthCity generate(const SynthSpec& spec);

}  // namespace dynacc
