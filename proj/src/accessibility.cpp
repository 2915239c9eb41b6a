#include "dynacc/accessibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynacc {

double decay(double cost_minutes, const DecayParams& params) {
  if (cost_minutes == kUnreachable) {
    return 0.0;
  }
  if (cost_minutes < 0.0 || std::isnan(cost_minutes)) {
    throw std::invalid_argument("decay: negative or invalid travel cost");
  }
  return std::exp(-params.beta * cost_minutes);
}

double accessibility_over_row(std::span<const double> costs, std::span<const Zone> zones,
                              const DecayParams& params) {
  if (costs.size() != zones.size()) {
    throw std::invalid_argument("cost row and zone list differ in size");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    if (costs[j] == kUnreachable) {
      continue;
    }
    total += zones[j].population * decay(costs[j], params);
  }
  return total;
}

double zone_accessibility(std::size_t origin, std::size_t departure_index,
                          const CostTensor& tensor, std::span<const Zone> zones,
                          const DecayParams& params) {
  return accessibility_over_row(tensor.row(origin, departure_index), zones, params);
}

namespace {

std::vector<double> relative_of(const std::vector<double>& values) {
  std::vector<double> rel(values.size(), 1.0);
  const double max = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (max <= 0.0) {
    return rel;  // degenerate zero series: flat profile
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    rel[i] = values[i] / max;
  }
  return rel;
}

}  // namespace

std::vector<double> AccessibilitySeries::relative() const { return relative_of(values); }

std::vector<double> GlobalProfile::relative() const { return relative_of(values); }

GlobalProfile global_profile(std::span<const AccessibilitySeries> series,
                             std::span<const Zone> zones) {
  if (series.empty()) {
    throw std::runtime_error("global profile needs at least one zone series");
  }
  const std::size_t n_instants = series.front().values.size();
  double total_weight = 0.0;
  for (const AccessibilitySeries& s : series) {
    if (s.values.size() != n_instants) {
      throw std::runtime_error("zone series have inconsistent lengths");
    }
    total_weight += zones[s.zone].population;
  }
  if (!(total_weight > 0.0)) {
    throw std::runtime_error("global profile: total origin weight is zero");
  }
  GlobalProfile profile;
  profile.values.assign(n_instants, 0.0);
  for (std::size_t t = 0; t < n_instants; ++t) {
    double weighted = 0.0;
    for (const AccessibilitySeries& s : series) {
      weighted += s.values[t] * zones[s.zone].population;
    }
    profile.values[t] = weighted / total_weight;
  }
  return profile;
}

std::pair<double, double> detect_peaks(std::span<const double> relative,
                                       std::span<const double> instants,
                                       const PeakWindows& windows) {
  if (relative.size() != instants.size()) {
    throw std::invalid_argument("series and schedule differ in length");
  }
  const auto window_min = [&](double lo, double hi) {
    double best_value = 0.0;
    double best_instant = -1.0;
    for (std::size_t i = 0; i < instants.size(); ++i) {
      if (instants[i] < lo || instants[i] >= hi) {
        continue;
      }
      if (best_instant < 0.0 || relative[i] < best_value) {
        best_value = relative[i];
        best_instant = instants[i];
      }
    }
    if (best_instant < 0.0) {
      throw std::runtime_error("peak window contains no departure instant");
    }
    return best_instant;
  };
  return {window_min(windows.morning_start, windows.morning_end),
          window_min(windows.afternoon_start, windows.afternoon_end)};
}

GlobalMetrics global_metrics(const GlobalProfile& profile, std::span<const double> instants,
                             const PeakWindows& windows) {
  if (profile.values.empty()) {
    throw std::invalid_argument("global metrics need a non-empty profile");
  }
  GlobalMetrics m;
  m.max = *std::max_element(profile.values.begin(), profile.values.end());
  double sum = 0.0;
  for (const double v : profile.values) {
    sum += v;
  }
  m.mean = sum / profile.values.size();
  std::vector<double> sorted(profile.values.begin(), profile.values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  m.median = (n % 2 == 1) ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  m.pct_mean_of_max = 100.0 * m.mean / m.max;
  m.pct_median_of_max = 100.0 * m.median / m.max;
  const std::vector<double> relative = profile.relative();
  const auto [morning, afternoon] = detect_peaks(relative, instants, windows);
  m.morning_peak_minute = morning;
  m.afternoon_peak_minute = afternoon;
  return m;
}

double peak_gap(double morning_ratio, double afternoon_ratio) {
  const double best = std::max(morning_ratio, afternoon_ratio);
  const double worst = std::min(morning_ratio, afternoon_ratio);
  if (worst >= 1.0) {
    return 0.0;
  }
  return (best - worst) / (1.0 - worst);
}

ZoneMetrics zone_metrics(const std::string& zone_id, const AccessibilitySeries& series,
                         std::span<const double> instants, const PeakWindows& windows,
                         double freeflow_access) {
  if (series.values.size() != instants.size()) {
    throw std::invalid_argument("series and schedule differ in length");
  }
  ZoneMetrics m;
  m.zone_id = zone_id;
  m.freeflow_access = freeflow_access;
  const std::vector<double> relative = series.relative();
  const auto [morning, afternoon] = detect_peaks(relative, instants, windows);
  m.morning_peak_minute = morning;
  m.afternoon_peak_minute = afternoon;

  const auto value_at = [&](double instant) {
    for (std::size_t i = 0; i < instants.size(); ++i) {
      if (instants[i] == instant) {
        return series.values[i];
      }
    }
    throw std::logic_error("peak instant not on the schedule");
  };
  // Ratios compare the congested peaks against the free-flow run, which is
  // the accessibility upper bound; clamp away any last-ulp overshoot.
  const auto ratio_of = [&](double value) {
    if (!(freeflow_access > 0.0)) {
      return 1.0;  // zero-accessibility zone: no congestion signal
    }
    return std::min(value / freeflow_access, 1.0);
  };
  m.morning_ratio = ratio_of(value_at(morning));
  m.afternoon_ratio = ratio_of(value_at(afternoon));

  std::size_t worst_index = 0;
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    if (series.values[i] < series.values[worst_index]) {
      worst_index = i;
    }
  }
  m.worst_minute = instants[worst_index];
  m.worst_is_morning = m.worst_minute < 720.0;
  m.gap = peak_gap(m.morning_ratio, m.afternoon_ratio);
  return m;
}

std::vector<CumulativeCurvePoint> cumulative_population_curve(std::span<const Zone> zones,
                                                              double downtown_x,
                                                              double downtown_y,
                                                              double ring_width_km) {
  if (!(ring_width_km > 0.0)) {
    throw std::invalid_argument("ring width must be positive");
  }
  double max_distance = 0.0;
  for (const Zone& zone : zones) {
    max_distance = std::max(max_distance, distance_to_downtown_km(zone, downtown_x, downtown_y));
  }
  const int rings = zones.empty()
                        ? 0
                        : static_cast<int>(std::ceil(max_distance / ring_width_km - 1e-12));
  std::vector<CumulativeCurvePoint> curve;
  double cumulative = 0.0;
  const double cell_area_km2 = (kZoneSizeMeters / 1000.0) * (kZoneSizeMeters / 1000.0);
  for (int r = 1; r <= std::max(rings, 1) && !zones.empty(); ++r) {
    const double inner = (r - 1) * ring_width_km;
    const double outer = r * ring_width_km;
    double ring_population = 0.0;
    std::size_t populated_cells = 0;
    for (const Zone& zone : zones) {
      const double d = distance_to_downtown_km(zone, downtown_x, downtown_y);
      const bool in_ring = d <= outer && (r == 1 || d > inner);
      if (in_ring) {
        ring_population += zone.population;
        if (zone.population > 0.0) {
          ++populated_cells;
        }
      }
    }
    cumulative += ring_population;
    CumulativeCurvePoint point;
    point.distance_km = outer;
    point.cumulative_population = cumulative;
    point.net_density_per_km2 =
        populated_cells == 0 ? 0.0
                             : ring_population / (populated_cells * cell_area_km2);
    curve.push_back(point);
  }
  return curve;
}

}  // namespace dynacc
