#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynacc/network.hpp"
#include "dynacc/routing.hpp"
#include "dynacc/zone.hpp"

namespace dynacc {

/// Aggregates the 1 km2 raster onto the 2x2 km grid covering `extent`.
/// Every grid cell intersecting the extent is emitted, zero-population cells
/// included, ordered by (row, col). Raster cells must be aligned to 1000 m
/// and fall inside the extent so population is conserved exactly.
std::vector<Zone> build_grid(const BoundingBox& extent, std::span<const RasterCell> raster);

/// Flags zones whose centroid falls inside the study extent.
void mark_study_area(std::vector<Zone>& zones, const BoundingBox& study_extent);

/// Euclidean centroid distance to the downtown reference point, km.
double distance_to_downtown_km(const Zone& zone, double downtown_x, double downtown_y);

/// Connects each zone centroid to its nearest network node that has at least
/// one incident link. Connector time = straight-line distance at the fixed
/// connector speed; ties on distance pick the lowest node index.
std::vector<ZoneAttachment> attach_zones(std::span<const Zone> zones, const Network& network,
                                         double connector_speed_kmh);

/// Zones outside the study area whose centroid can be reached from the
/// nearest study-zone centroid within `threshold_minutes`, departing at
/// midnight (all links at free flow). These become extra destinations that
/// soften border effects; they carry no Eq.-B weight and no reported metrics.
std::vector<std::uint32_t> compute_border_buffer(const SearchGraph& graph,
                                                 std::span<const Zone> zones,
                                                 double threshold_minutes);

}  // namespace dynacc
