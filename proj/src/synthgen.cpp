#include "dynacc/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace dynacc {

namespace {

constexpr double kRadialSpeedKmh = 80.0;
constexpr double kRingSpeedKmh = 50.0;
constexpr int kRadialFrc = 1;
constexpr int kRingFrc = 3;

double gaussian(double t, const CongestionDip& dip) {
  const double z = (t - dip.center_minute) / dip.half_width_minutes;
  return std::exp(-0.5 * z * z);
}

SpeedProfile make_profile(const std::string& id, const SynthSpec& spec, double morning_scale,
                          double afternoon_scale) {
  std::vector<double> fractions(kProfileSize);
  for (int k = 0; k < kProfileSize; ++k) {
    const double t = kProfileWindowStart + k * kProfileStepMinutes;
    const double drop = morning_scale * spec.morning_dip.depth * gaussian(t, spec.morning_dip) +
                        afternoon_scale * spec.afternoon_dip.depth *
                            gaussian(t, spec.afternoon_dip);
    fractions[k] = std::max(1.0 - drop, 0.05);
  }
  return SpeedProfile(id, std::move(fractions));
}

double snap_down(double v, double step) { return std::floor(v / step) * step; }
double snap_up(double v, double step) { return std::ceil(v / step) * step; }

}  // namespace

SynthCity generate(const SynthSpec& spec) {
  if (spec.rings < 1 || spec.radials < 3) {
    throw std::invalid_argument("synthetic city needs at least 1 ring and 3 radials");
  }
  if (!(spec.ring_spacing_km > 0.0)) {
    throw std::invalid_argument("ring spacing must be positive");
  }
  for (const CongestionDip* dip : {&spec.morning_dip, &spec.afternoon_dip}) {
    if (dip->depth < 0.0 || dip->depth >= 1.0 || !(dip->half_width_minutes > 0.0)) {
      throw std::invalid_argument("congestion dips need depth in [0,1) and positive width");
    }
  }
  if (spec.direction_asymmetry < 0.0 || spec.direction_asymmetry > 1.0) {
    throw std::invalid_argument("direction asymmetry must lie in [0,1]");
  }
  if (spec.core_population < 0.0 || spec.density_decay_per_km < 0.0) {
    throw std::invalid_argument("population parameters must be non-negative");
  }

  SynthCity city;
  city.downtown_x = 1000.0;  // centroid of the 2x2 km cell at the origin corner
  city.downtown_y = 1000.0;

  const int rings = spec.rings;
  const int radials = spec.radials;
  const double spacing_m = spec.ring_spacing_km * 1000.0;

  // Per-ring angular offsets give each seed its own geometry without
  // disturbing the overall radial symmetry.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.25);
  std::vector<double> ring_offset(rings + 1, 0.0);
  for (int r = 1; r <= rings; ++r) {
    ring_offset[r] = jitter(rng) * (2.0 * std::numbers::pi / radials);
  }

  // Nodes: node 0 is downtown, then ring-major.
  city.nodes.push_back({"center", city.downtown_x, city.downtown_y});
  const auto node_index = [&](int ring, int radial) -> std::uint32_t {
    if (ring == 0) {
      return 0;
    }
    return static_cast<std::uint32_t>(1 + (ring - 1) * radials + radial);
  };
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < radials; ++s) {
      const double angle = 2.0 * std::numbers::pi * s / radials + ring_offset[r];
      Node node;
      node.id = "n" + std::to_string(r) + "_" + std::to_string(s);
      node.x = city.downtown_x + r * spacing_m * std::cos(angle);
      node.y = city.downtown_y + r * spacing_m * std::sin(angle);
      city.nodes.push_back(std::move(node));
    }
  }

  // Profiles per ring band: inbound radials dip in the morning, outbound in
  // the afternoon, ring roads get both at half strength. Dips deepen
  // linearly with distance from the center.
  const double cross = 1.0 - spec.direction_asymmetry;
  const auto band_profile = [&](const char* kind, int band, double radius_factor,
                                double morning_scale, double afternoon_scale) {
    const std::string id = std::string(kind) + "_b" + std::to_string(band);
    city.profiles.push_back(make_profile(id, spec, morning_scale * radius_factor,
                                         afternoon_scale * radius_factor));
    return static_cast<std::int32_t>(city.profiles.size() - 1);
  };
  std::vector<std::int32_t> inbound_profile(rings + 1), outbound_profile(rings + 1),
      ring_profile(rings + 1);
  for (int b = 1; b <= rings; ++b) {
    const double segment_rf = (b - 0.5) / rings;  // radial segment mid-radius
    const double ring_rf = static_cast<double>(b) / rings;
    inbound_profile[b] = band_profile("in", b, segment_rf, 1.0, cross);
    outbound_profile[b] = band_profile("out", b, segment_rf, cross, 1.0);
    ring_profile[b] = band_profile("ring", b, ring_rf, 0.5, 0.5);
  }

  const auto add_link = [&](std::string id, std::uint32_t from, std::uint32_t to, double kmh,
                            int frc, std::int32_t profile) {
    Link link;
    link.id = std::move(id);
    link.from = from;
    link.to = to;
    const double dx = city.nodes[to].x - city.nodes[from].x;
    const double dy = city.nodes[to].y - city.nodes[from].y;
    link.length_m = std::sqrt(dx * dx + dy * dy);
    link.freeflow_kmh = kmh;
    link.road_class.frc = frc;
    link.profile = profile;
    city.links.push_back(std::move(link));
  };

  for (int r = 0; r < rings; ++r) {
    const int band = r + 1;
    for (int s = 0; s < radials; ++s) {
      const std::uint32_t inner = node_index(r, s);
      const std::uint32_t outer = node_index(r + 1, s);
      add_link("ro" + std::to_string(r) + "_" + std::to_string(s), inner, outer,
               kRadialSpeedKmh, kRadialFrc, outbound_profile[band]);
      add_link("ri" + std::to_string(r) + "_" + std::to_string(s), outer, inner,
               kRadialSpeedKmh, kRadialFrc, inbound_profile[band]);
    }
  }
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < radials; ++s) {
      const std::uint32_t a = node_index(r, s);
      const std::uint32_t b = node_index(r, (s + 1) % radials);
      add_link("rc" + std::to_string(r) + "_" + std::to_string(s), a, b, kRingSpeedKmh,
               kRingFrc, ring_profile[r]);
      add_link("ra" + std::to_string(r) + "_" + std::to_string(s), b, a, kRingSpeedKmh,
               kRingFrc, ring_profile[r]);
    }
  }

  // Study extent: the square circumscribing the outermost ring. The raster
  // reaches 6 km further so border-buffer candidates exist, snapped to whole
  // 2 km cells so every zone sees its full four raster cells.
  const double extent_m = rings * spacing_m;
  city.study_extent = {city.downtown_x - extent_m, city.downtown_y - extent_m,
                       city.downtown_x + extent_m, city.downtown_y + extent_m};
  const double raster_min_x = snap_down(city.study_extent.min_x - 6000.0, kZoneSizeMeters);
  const double raster_min_y = snap_down(city.study_extent.min_y - 6000.0, kZoneSizeMeters);
  const double raster_max_x = snap_up(city.study_extent.max_x + 6000.0, kZoneSizeMeters);
  const double raster_max_y = snap_up(city.study_extent.max_y + 6000.0, kZoneSizeMeters);

  // Population: integer weight per cell, linear in core_population, so a
  // doubled core doubles every accessibility value exactly.
  for (double y = raster_min_y; y < raster_max_y; y += kRasterSizeMeters) {
    for (double x = raster_min_x; x < raster_max_x; x += kRasterSizeMeters) {
      const double cx = x + kRasterSizeMeters / 2.0;
      const double cy = y + kRasterSizeMeters / 2.0;
      const double d_km =
          std::hypot(cx - city.downtown_x, cy - city.downtown_y) / 1000.0;
      const double weight =
          static_cast<double>(std::llround(1000.0 * std::exp(-spec.density_decay_per_km * d_km)));
      const double population = spec.core_population * weight;
      city.raster.push_back({x, y, population});
    }
  }
  return city;
}

}  // namespace dynacc
