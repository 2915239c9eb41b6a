#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynacc/accessibility.hpp"
#include "dynacc/clustering.hpp"
#include "dynacc/network.hpp"
#include "dynacc/routing.hpp"
#include "dynacc/synthgen.hpp"
#include "dynacc/zoning.hpp"

namespace dynacc {

/// Flat key=value run configuration. File paths are resolved relative to the
/// directory containing the config file.
struct ScenarioConfig {
  std::string nodes_path;
  std::string links_path;
  std::string profiles_path;
  std::string restrictions_path;  // optional
  std::string population_path;

  double beta = 0.065;
  DepartureSchedule schedule;
  double connector_speed_kmh = 20.0;
  PeakWindows peak_windows;
  double buffer_threshold_minutes = 15.0;
  double downtown_x = 0.0;
  double downtown_y = 0.0;
  BoundingBox study_extent;
  std::string output_dir = "out";
  bool include_buffer_destinations = true;
  double ring_width_km = 2.0;
  int cluster_k = 4;
  std::uint64_t cluster_seed = 1;
  std::string crs_name = "ETRS89-LAEA";
  unsigned threads = 0;  // 0 = hardware concurrency
};

ScenarioConfig load_config(const std::string& path);

/// A fully validated, FIFO-repaired in-memory scenario.
struct Scenario {
  Network network;
  std::vector<Zone> zones;  // full grid, study flags set
  ScenarioConfig config;
  FifoRepairReport repair;
};

Scenario load_scenario(const std::string& config_path);

/// Reference profile CSV: label,t0000,t0015,... with relative values in
/// (0, 1] whose maximum is 1.
std::vector<ReferenceProfile> read_reference_profiles(const std::string& path);
void write_reference_profiles(const std::vector<ReferenceProfile>& references,
                              const std::string& path);

/// Generic per-zone series CSV (zone_id,t....); used by the classify command
/// to re-read emitted zone series.
struct NamedSeries {
  std::string id;
  std::vector<double> values;
};
std::vector<NamedSeries> read_series_csv(const std::string& path);

/// Serializes a synthetic city into the standard ingest files plus a ready
/// scenario.cfg inside `directory`.
void write_scenario_files(const SynthCity& city, const SynthSpec& spec,
                          const std::string& directory);

}  // namespace dynacc
