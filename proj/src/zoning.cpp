#include "dynacc/zoning.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace dynacc {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

std::string zone_id(int col, int row) {
  return "c" + std::to_string(col) + "_r" + std::to_string(row);
}

}  // namespace

std::vector<Zone> build_grid(const BoundingBox& extent, std::span<const RasterCell> raster) {
  if (!(extent.max_x > extent.min_x) || !(extent.max_y > extent.min_y)) {
    throw std::runtime_error("grid extent is empty");
  }
  const long long zone_m = static_cast<long long>(kZoneSizeMeters);
  const long long col_lo = floor_div(static_cast<long long>(std::floor(extent.min_x)), zone_m);
  const long long row_lo = floor_div(static_cast<long long>(std::floor(extent.min_y)), zone_m);
  // Cells touching the extent only along its max edge are not included.
  const long long col_hi = floor_div(static_cast<long long>(std::ceil(extent.max_x)) - 1, zone_m);
  const long long row_hi = floor_div(static_cast<long long>(std::ceil(extent.max_y)) - 1, zone_m);

  std::map<std::pair<int, int>, double> population;  // (row, col) -> count
  for (long long r = row_lo; r <= row_hi; ++r) {
    for (long long c = col_lo; c <= col_hi; ++c) {
      population[{static_cast<int>(r), static_cast<int>(c)}] = 0.0;
    }
  }
  for (std::size_t i = 0; i < raster.size(); ++i) {
    const RasterCell& cell = raster[i];
    const long long xi = std::llround(cell.x);
    const long long yi = std::llround(cell.y);
    const long long raster_m = static_cast<long long>(kRasterSizeMeters);
    if (std::abs(cell.x - static_cast<double>(xi)) > 1e-6 ||
        std::abs(cell.y - static_cast<double>(yi)) > 1e-6 || xi % raster_m != 0 ||
        yi % raster_m != 0) {
      throw std::runtime_error("misaligned raster cell at index " + std::to_string(i) +
                               ": corners must be multiples of 1000 m");
    }
    if (cell.population < 0.0 || !std::isfinite(cell.population)) {
      throw std::runtime_error("raster cell at index " + std::to_string(i) +
                               " has invalid population");
    }
    const int col = static_cast<int>(floor_div(xi, zone_m));
    const int row = static_cast<int>(floor_div(yi, zone_m));
    const auto it = population.find({row, col});
    if (it == population.end()) {
      throw std::runtime_error("raster cell at index " + std::to_string(i) +
                               " lies outside the grid extent");
    }
    it->second += cell.population;
  }

  std::vector<Zone> zones;
  zones.reserve(population.size());
  for (const auto& [key, pop] : population) {
    Zone zone;
    zone.row = key.first;
    zone.col = key.second;
    zone.id = zone_id(zone.col, zone.row);
    zone.centroid_x = zone.col * kZoneSizeMeters + kZoneSizeMeters / 2.0;
    zone.centroid_y = zone.row * kZoneSizeMeters + kZoneSizeMeters / 2.0;
    zone.population = pop;
    zones.push_back(std::move(zone));
  }
  return zones;
}

void mark_study_area(std::vector<Zone>& zones, const BoundingBox& study_extent) {
  for (Zone& zone : zones) {
    zone.in_study_area = study_extent.contains(zone.centroid_x, zone.centroid_y);
  }
}

double distance_to_downtown_km(const Zone& zone, double downtown_x, double downtown_y) {
  const double dx = zone.centroid_x - downtown_x;
  const double dy = zone.centroid_y - downtown_y;
  return std::sqrt(dx * dx + dy * dy) / 1000.0;
}

std::vector<ZoneAttachment> attach_zones(std::span<const Zone> zones, const Network& network,
                                         double connector_speed_kmh) {
  if (!(connector_speed_kmh > 0.0)) {
    throw std::invalid_argument("connector speed must be positive");
  }
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t n = 0; n < network.nodes().size(); ++n) {
    if (network.node_has_incident_link(n)) {
      candidates.push_back(n);
    }
  }
  if (candidates.empty()) {
    throw std::runtime_error("network has no nodes with incident links to attach zones to");
  }
  std::vector<ZoneAttachment> attachments;
  attachments.reserve(zones.size());
  for (const Zone& zone : zones) {
    std::uint32_t best_node = candidates.front();
    double best_sq = std::numeric_limits<double>::infinity();
    for (const std::uint32_t n : candidates) {
      const Node& node = network.nodes()[n];
      const double dx = node.x - zone.centroid_x;
      const double dy = node.y - zone.centroid_y;
      const double sq = dx * dx + dy * dy;
      if (sq < best_sq) {
        best_sq = sq;
        best_node = n;
      }
    }
    ZoneAttachment at;
    at.node = best_node;
    at.connector_minutes = std::sqrt(best_sq) / 1000.0 / connector_speed_kmh * 60.0;
    attachments.push_back(at);
  }
  return attachments;
}

std::vector<std::uint32_t> compute_border_buffer(const SearchGraph& graph,
                                                 std::span<const Zone> zones,
                                                 double threshold_minutes) {
  if (zones.size() != graph.zone_count()) {
    throw std::invalid_argument("zone list does not match the search graph");
  }
  std::vector<std::uint32_t> study;
  for (std::uint32_t i = 0; i < zones.size(); ++i) {
    if (zones[i].in_study_area) {
      study.push_back(i);
    }
  }
  std::vector<std::uint32_t> buffer;
  if (study.empty()) {
    return buffer;
  }
  // Midnight departure: the profile window is hours away, so every link runs
  // at free flow. Reachability from "any study cell" is the multi-source
  // minimum over all study centroids.
  const ArrivalLabels labels = td_multi_source(graph, study, 0.0);
  for (std::uint32_t i = 0; i < zones.size(); ++i) {
    if (zones[i].in_study_area) {
      continue;
    }
    const double minutes = labels.travel_minutes(i);
    if (minutes <= threshold_minutes) {
      buffer.push_back(i);
    }
  }
  return buffer;
}

}  // namespace dynacc
