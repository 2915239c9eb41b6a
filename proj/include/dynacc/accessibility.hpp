#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynacc/routing.hpp"
#include "dynacc/zoning.hpp"

namespace dynacc {

/// Impedance-decay rate, per minute of travel time.
struct DecayParams {
  double beta = 0.065;
};

/// exp(-beta * cost). Zero cost maps every opportunity into one MPU;
/// unreachable destinations contribute nothing.
double decay(double cost_minutes, const DecayParams& params);

/// Potential accessibility of one origin at one departure: sum over all
/// destination zones of population * decay(cost). Includes the origin itself
/// at zero cost.
double accessibility_over_row(std::span<const double> costs, std::span<const Zone> zones,
                              const DecayParams& params);

double zone_accessibility(std::size_t origin, std::size_t departure_index,
                          const CostTensor& tensor, std::span<const Zone> zones,
                          const DecayParams& params);

/// One zone's accessibility over the departure schedule (MPU).
struct AccessibilitySeries {
  std::uint32_t zone = 0;
  std::vector<double> values;

  /// Fraction-of-max form used for peak detection and classification.
  /// A series that is identically zero maps to a flat 1.0 profile.
  std::vector<double> relative() const;
};

/// Population-weighted mean accessibility per departure instant.
struct GlobalProfile {
  std::vector<double> values;

  std::vector<double> relative() const;
};

/// Weighted mean of the study-zone series; weights are zone populations.
GlobalProfile global_profile(std::span<const AccessibilitySeries> series,
                             std::span<const Zone> zones);

struct PeakWindows {
  double morning_start = 300.0;     // 05:00
  double morning_end = 720.0;       // 12:00 (exclusive)
  double afternoon_start = 720.0;   // 12:00
  double afternoon_end = 1320.0;    // 22:00 (exclusive)
};

/// Departure instants of minimum relative accessibility within the morning
/// and afternoon windows; ties resolve to the earliest instant.
std::pair<double, double> detect_peaks(std::span<const double> relative,
                                       std::span<const double> instants,
                                       const PeakWindows& windows);

struct GlobalMetrics {
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double pct_mean_of_max = 0.0;
  double pct_median_of_max = 0.0;
  double morning_peak_minute = 0.0;
  double afternoon_peak_minute = 0.0;
};

GlobalMetrics global_metrics(const GlobalProfile& profile, std::span<const double> instants,
                             const PeakWindows& windows);

/// Normalized gap between the better and the worse congestion peak:
/// (best - worst) / (1 - worst); zero when both peaks are at free flow.
double peak_gap(double morning_ratio, double afternoon_ratio);

struct ZoneMetrics {
  std::string zone_id;
  double freeflow_access = 0.0;  // MPU under all-free-flow conditions
  double morning_peak_minute = 0.0;
  double afternoon_peak_minute = 0.0;
  double morning_ratio = 1.0;    // accessibility at the peak / free-flow value
  double afternoon_ratio = 1.0;
  double worst_minute = 0.0;     // instant of the series minimum
  bool worst_is_morning = false; // worst instant before 12:00
  double gap = 0.0;              // peak_gap of the two ratios
  std::string cluster_label;     // filled by the classification step
};

ZoneMetrics zone_metrics(const std::string& zone_id, const AccessibilitySeries& series,
                         std::span<const double> instants, const PeakWindows& windows,
                         double freeflow_access);

struct CumulativeCurvePoint {
  double distance_km = 0.0;          // outer radius of the ring
  double cumulative_population = 0;  // population within distance_km
  double net_density_per_km2 = 0.0;  // ring population / area of its populated cells
};

/// Population accumulation and net density by distance ring from downtown.
std::vector<CumulativeCurvePoint> cumulative_population_curve(std::span<const Zone> zones,
                                                              double downtown_x,
                                                              double downtown_y,
                                                              double ring_width_km);

}  // namespace dynacc
