#include "dynacc/pipeline.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "dynacc/parallel.hpp"
#include "dynacc/routing.hpp"

namespace dynacc {

RunResult run_pipeline(const Scenario& scenario, std::vector<ReferenceProfile> references) {
  const Network& network = scenario.network;
  const ScenarioConfig& cfg = scenario.config;

  RunResult result;
  result.config = cfg;
  result.repair = scenario.repair;
  result.instants = cfg.schedule.instants();

  // Border buffer on the full grid, then restrict everything to the
  // analysis set: study zones plus (optionally) the buffer.
  const std::vector<ZoneAttachment> full_attachments =
      attach_zones(scenario.zones, network, cfg.connector_speed_kmh);
  std::vector<std::uint32_t> buffer_full;
  {
    const SearchGraph full_graph(network, full_attachments);
    buffer_full =
        compute_border_buffer(full_graph, scenario.zones, cfg.buffer_threshold_minutes);
  }
  std::set<std::uint32_t> buffer_set(buffer_full.begin(), buffer_full.end());

  std::vector<ZoneAttachment> attachments;
  for (std::uint32_t i = 0; i < scenario.zones.size(); ++i) {
    const bool in_buffer = buffer_set.contains(i);
    if (!scenario.zones[i].in_study_area && !(in_buffer && cfg.include_buffer_destinations)) {
      continue;
    }
    const auto index = static_cast<std::uint32_t>(result.analysis_zones.size());
    result.analysis_zones.push_back(scenario.zones[i]);
    attachments.push_back(full_attachments[i]);
    (scenario.zones[i].in_study_area ? result.study_indices : result.buffer_indices)
        .push_back(index);
  }
  if (result.study_indices.empty()) {
    throw std::runtime_error("no study zones inside the study extent");
  }

  const SearchGraph graph(network, attachments);
  const std::size_t n_study = result.study_indices.size();
  const std::size_t n_instants = result.instants.size();
  const DecayParams decay_params{cfg.beta};

  // Free-flow baseline: one static evaluation with every profile at 100%.
  result.freeflow_access.assign(n_study, 0.0);
  result.series.resize(n_study);
  for (std::size_t s = 0; s < n_study; ++s) {
    result.series[s].zone = result.study_indices[s];
    result.series[s].values.assign(n_instants, 0.0);
  }
  const QueryOptions freeflow_query{.freeflow = true};
  parallel_for(n_study, cfg.threads, [&](std::size_t s, RoutingWorkspace& ws) {
    const ArrivalLabels labels =
        td_one_to_all(graph, result.study_indices[s], 0.0, freeflow_query, &ws);
    std::vector<double> row(result.analysis_zones.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = labels.travel_minutes(j);
    }
    row[result.study_indices[s]] = 0.0;
    result.freeflow_access[s] = accessibility_over_row(row, result.analysis_zones, decay_params);
  });

  // Dynamic runs: one query per (study origin, departure instant).
  parallel_for(n_study * n_instants, cfg.threads, [&](std::size_t task, RoutingWorkspace& ws) {
    const std::size_t s = task / n_instants;
    const std::size_t t = task % n_instants;
    const ArrivalLabels labels =
        td_one_to_all(graph, result.study_indices[s], result.instants[t], {}, &ws);
    std::vector<double> row(result.analysis_zones.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = labels.travel_minutes(j);
    }
    row[result.study_indices[s]] = 0.0;
    result.series[s].values[t] =
        accessibility_over_row(row, result.analysis_zones, decay_params);
  });

  // Global aggregation (study-zone weights only).
  result.global = global_profile(result.series, result.analysis_zones);
  result.metrics = global_metrics(result.global, result.instants, cfg.peak_windows);
  {
    double weighted = 0.0, weight = 0.0;
    for (std::size_t s = 0; s < n_study; ++s) {
      const double population = result.analysis_zones[result.study_indices[s]].population;
      weighted += result.freeflow_access[s] * population;
      weight += population;
    }
    result.freeflow_global = weighted / weight;
  }

  // Per-zone metrics.
  result.zone_rows.reserve(n_study);
  for (std::size_t s = 0; s < n_study; ++s) {
    const Zone& zone = result.analysis_zones[result.study_indices[s]];
    result.zone_rows.push_back(zone_metrics(zone.id, result.series[s], result.instants,
                                            cfg.peak_windows, result.freeflow_access[s]));
  }

  // Classification: against the provided references, or against reference
  // profiles built from this run with longitudinal k-means (centroids are
  // renormalized so their maximum is 1, like any relative profile).
  std::vector<std::vector<double>> relative(n_study);
  for (std::size_t s = 0; s < n_study; ++s) {
    relative[s] = result.series[s].relative();
  }
  if (references.empty()) {
    std::set<std::vector<double>> distinct(relative.begin(), relative.end());
    const int k = std::min<int>(cfg.cluster_k, static_cast<int>(distinct.size()));
    const KMeansResult km = kmeans_longitudinal(relative, k, cfg.cluster_seed);
    for (std::size_t c = 0; c < km.centroids.size(); ++c) {
      ReferenceProfile ref;
      ref.label = "C" + std::to_string(c + 1);
      ref.values = km.centroids[c];
      const double max = *std::max_element(ref.values.begin(), ref.values.end());
      if (max > 0.0) {
        for (double& v : ref.values) {
          v /= max;
        }
      }
      references.push_back(std::move(ref));
    }
  }
  result.references = std::move(references);
  result.assignments.reserve(n_study);
  for (std::size_t s = 0; s < n_study; ++s) {
    Classification c = classify(relative[s], result.references);
    result.zone_rows[s].cluster_label = c.label;
    result.assignments.push_back(std::move(c));
  }

  // Zone-level aggregates.
  result.max_cell_freeflow =
      *std::max_element(result.freeflow_access.begin(), result.freeflow_access.end());
  std::size_t above = 0, worst_morning = 0;
  for (std::size_t s = 0; s < n_study; ++s) {
    if (result.freeflow_access[s] > 0.8 * result.max_cell_freeflow) {
      ++above;
    }
    if (result.zone_rows[s].worst_is_morning) {
      ++worst_morning;
    }
  }
  result.pct_cells_above_80pct_max = 100.0 * above / n_study;
  result.pct_cells_worst_morning = 100.0 * worst_morning / n_study;
  result.pct_cells_worst_afternoon = 100.0 * (n_study - worst_morning) / n_study;

  // Cumulative population over the study area.
  std::vector<Zone> study_zones;
  study_zones.reserve(n_study);
  for (const std::uint32_t i : result.study_indices) {
    study_zones.push_back(result.analysis_zones[i]);
  }
  result.curve = cumulative_population_curve(study_zones, cfg.downtown_x, cfg.downtown_y,
                                             cfg.ring_width_km);
  return result;
}

}  // namespace dynacc
