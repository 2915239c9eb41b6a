#pragma once

#include <cstdint>
#include <vector>

#include "dynacc/accessibility.hpp"
#include "dynacc/clustering.hpp"
#include "dynacc/io.hpp"

namespace dynacc {

/// Everything one full run produces; write_reports serializes it.
struct RunResult {
  std::vector<Zone> analysis_zones;            // study + buffer, grid order
  std::vector<std::uint32_t> study_indices;    // into analysis_zones
  std::vector<std::uint32_t> buffer_indices;   // into analysis_zones
  std::vector<double> instants;

  std::vector<AccessibilitySeries> series;     // one per study zone
  std::vector<double> freeflow_access;         // aligned with series
  GlobalProfile global;
  GlobalMetrics metrics;
  double freeflow_global = 0.0;

  std::vector<ZoneMetrics> zone_rows;          // aligned with series
  std::vector<ReferenceProfile> references;    // set used for classification
  std::vector<Classification> assignments;     // aligned with series

  // Zone-level aggregates (share of cells by behaviour).
  double max_cell_freeflow = 0.0;
  double pct_cells_above_80pct_max = 0.0;
  double pct_cells_worst_morning = 0.0;
  double pct_cells_worst_afternoon = 0.0;

  std::vector<CumulativeCurvePoint> curve;
  FifoRepairReport repair;
  ScenarioConfig config;
};

/// Full batch run: attach zones, resolve the border buffer, route every
/// (origin, departure) pair, evaluate accessibility, derive all metrics and
/// classify zone profiles. `references` may be empty, in which case a
/// reference set is built from the run itself with longitudinal k-means.
RunResult run_pipeline(const Scenario& scenario, std::vector<ReferenceProfile> references = {});

/// Writes the six report files (plus the reference set and repair log) into
/// `output_dir`, creating it if needed.
void write_reports(const RunResult& result, const std::string& output_dir);

}  // namespace dynacc
