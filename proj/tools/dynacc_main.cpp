#include <exception>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dynacc/io.hpp"
#include "dynacc/pipeline.hpp"
#include "dynacc/time_of_day.hpp"

namespace {

void print_repair_summary(const dynacc::FifoRepairReport& repair) {
  std::cout << "fifo repair: " << repair.repaired_links.size() << " of "
            << repair.profiled_links << " profiled links adjusted ("
            << repair.breakpoints_changed << "/" << repair.breakpoints_total
            << " breakpoints)\n";
}

int run_command_scenario(const dynacc::Scenario& scenario, const std::string& refs_path) {
  std::vector<dynacc::ReferenceProfile> references;
  if (!refs_path.empty()) {
    references = dynacc::read_reference_profiles(refs_path);
  }
  std::cout << "loaded " << scenario.network.nodes().size() << " nodes, "
            << scenario.network.links().size() << " links, " << scenario.zones.size()
            << " grid zones\n";
  print_repair_summary(scenario.repair);

  const dynacc::RunResult result = dynacc::run_pipeline(scenario, std::move(references));
  dynacc::write_reports(result, result.config.output_dir);

  std::cout << "study zones: " << result.study_indices.size()
            << ", buffer zones: " << result.buffer_indices.size() << '\n';
  std::cout << "global accessibility: free flow " << result.freeflow_global << " MPU, max "
            << result.metrics.max << ", mean " << result.metrics.mean << " ("
            << result.metrics.pct_mean_of_max << "% of max), median " << result.metrics.median
            << " (" << result.metrics.pct_median_of_max << "%)\n";
  std::cout << "peaks: morning " << dynacc::format_hhmm(result.metrics.morning_peak_minute)
            << ", afternoon " << dynacc::format_hhmm(result.metrics.afternoon_peak_minute)
            << '\n';
  std::cout << "cells worst in the morning: " << result.pct_cells_worst_morning
            << "%, afternoon: " << result.pct_cells_worst_afternoon << "%\n";
  std::cout << "reports written to " << result.config.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynacc: congestion-aware automobile accessibility over a gridded area"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic ring-radial scenario");
  dynacc::SynthSpec spec;
  std::string synth_out = "scenario";
  synth->add_option("--out", synth_out, "output directory")->capture_default_str();
  synth->add_option("--rings", spec.rings)->capture_default_str();
  synth->add_option("--radials", spec.radials)->capture_default_str();
  synth->add_option("--spacing-km", spec.ring_spacing_km)->capture_default_str();
  synth->add_option("--core-pop", spec.core_population)->capture_default_str();
  synth->add_option("--density-decay", spec.density_decay_per_km)->capture_default_str();
  synth->add_option("--morning-depth", spec.morning_dip.depth)->capture_default_str();
  synth->add_option("--morning-center", spec.morning_dip.center_minute, "minute of day")
      ->capture_default_str();
  synth->add_option("--morning-width", spec.morning_dip.half_width_minutes)
      ->capture_default_str();
  synth->add_option("--afternoon-depth", spec.afternoon_dip.depth)->capture_default_str();
  synth->add_option("--afternoon-center", spec.afternoon_dip.center_minute, "minute of day")
      ->capture_default_str();
  synth->add_option("--afternoon-width", spec.afternoon_dip.half_width_minutes)
      ->capture_default_str();
  synth->add_option("--asymmetry", spec.direction_asymmetry)->capture_default_str();
  synth->add_option("--seed", spec.seed)->capture_default_str();

  // validate
  auto* validate = app.add_subcommand("validate", "load and validate a scenario");
  std::string validate_config;
  validate->add_option("--config", validate_config, "scenario config file")->required();

  // run
  auto* run = app.add_subcommand("run", "full pipeline: routing, accessibility, reports");
  std::string run_config, run_refs;
  unsigned run_threads = 0;
  double run_beta = 0.0, run_connector = 0.0, run_buffer_threshold = -1.0;
  int run_cluster_k = 0;
  long long run_cluster_seed = -1;
  bool run_threads_set = false, no_buffer = false;
  std::string run_outdir;
  run->add_option("--config", run_config, "scenario config file")->required();
  run->add_option("--refs", run_refs, "reference profiles for classification");
  run->add_option("--threads", run_threads, "worker threads (0 = all cores)")
      ->each([&](const std::string&) { run_threads_set = true; });
  run->add_option("--output-dir", run_outdir, "override the configured output directory");
  run->add_option("--beta", run_beta, "override the decay rate per minute");
  run->add_option("--connector-speed-kmh", run_connector, "override the connector speed");
  run->add_option("--buffer-threshold-min", run_buffer_threshold,
                  "override the border-buffer reach");
  run->add_option("--cluster-k", run_cluster_k, "override the built-in reference count");
  run->add_option("--cluster-seed", run_cluster_seed, "override the k-means seed");
  run->add_flag("--no-buffer", no_buffer, "exclude border-buffer cells from destinations");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "assign zone series to references");
  std::string classify_series, classify_refs, classify_out = "classification.csv";
  classify_cmd->add_option("--series", classify_series, "zone_series.csv from a run")
      ->required();
  classify_cmd->add_option("--refs", classify_refs, "reference profiles csv")->required();
  classify_cmd->add_option("--out", classify_out)->capture_default_str();

  // curve
  auto* curve_cmd = app.add_subcommand("curve", "cumulative population by distance ring");
  std::string curve_config, curve_out = "cumulative_population.csv";
  double curve_ring_width = 2.0;
  curve_cmd->add_option("--config", curve_config, "scenario config file")->required();
  curve_cmd->add_option("--out", curve_out)->capture_default_str();
  curve_cmd->add_option("--ring-width-km", curve_ring_width)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const dynacc::SynthCity city = dynacc::generate(spec);
      dynacc::write_scenario_files(city, spec, synth_out);
      std::cout << "wrote scenario with " << city.nodes.size() << " nodes, "
                << city.links.size() << " links, " << city.raster.size()
                << " population cells to " << synth_out << '\n';
      return 0;
    }
    if (validate->parsed()) {
      const dynacc::Scenario scenario = dynacc::load_scenario(validate_config);
      std::size_t study = 0;
      for (const dynacc::Zone& zone : scenario.zones) {
        study += zone.in_study_area ? 1 : 0;
      }
      std::cout << "ok: " << scenario.network.nodes().size() << " nodes, "
                << scenario.network.links().size() << " links, "
                << scenario.network.profiles().size() << " profiles, "
                << scenario.network.restrictions().size() << " restrictions, "
                << scenario.zones.size() << " zones (" << study << " study)\n";
      print_repair_summary(scenario.repair);
      return 0;
    }
    if (run->parsed()) {
      dynacc::Scenario scenario = dynacc::load_scenario(run_config);
      if (run_threads_set) {
        scenario.config.threads = run_threads;
      }
      if (!run_outdir.empty()) {
        scenario.config.output_dir = run_outdir;
      }
      if (run_beta > 0.0) {
        scenario.config.beta = run_beta;
      }
      if (run_connector > 0.0) {
        scenario.config.connector_speed_kmh = run_connector;
      }
      if (run_buffer_threshold >= 0.0) {
        scenario.config.buffer_threshold_minutes = run_buffer_threshold;
      }
      if (run_cluster_k > 0) {
        scenario.config.cluster_k = run_cluster_k;
      }
      if (run_cluster_seed >= 0) {
        scenario.config.cluster_seed = static_cast<std::uint64_t>(run_cluster_seed);
      }
      if (no_buffer) {
        scenario.config.include_buffer_destinations = false;
      }
      return run_command_scenario(scenario, run_refs);
    }
    if (classify_cmd->parsed()) {
      const auto references = dynacc::read_reference_profiles(classify_refs);
      const auto series = dynacc::read_series_csv(classify_series);
      std::ofstream out(classify_out);
      if (!out) {
        throw std::runtime_error("cannot write " + classify_out);
      }
      out << "zone_id,label,distance\n";
      for (const dynacc::NamedSeries& s : series) {
        // Raw MPU series are normalized to their fraction-of-max form first.
        dynacc::AccessibilitySeries as;
        as.values = s.values;
        const auto c = dynacc::classify(as.relative(), references);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9f", c.distance);
        out << s.id << ',' << c.label << ',' << buf << '\n';
      }
      std::cout << "classified " << series.size() << " zones against " << references.size()
                << " references into " << classify_out << '\n';
      return 0;
    }
    if (curve_cmd->parsed()) {
      const dynacc::Scenario scenario = dynacc::load_scenario(curve_config);
      std::vector<dynacc::Zone> study;
      for (const dynacc::Zone& zone : scenario.zones) {
        if (zone.in_study_area) {
          study.push_back(zone);
        }
      }
      const auto curve = dynacc::cumulative_population_curve(
          study, scenario.config.downtown_x, scenario.config.downtown_y, curve_ring_width);
      std::ofstream out(curve_out);
      if (!out) {
        throw std::runtime_error("cannot write " + curve_out);
      }
      out << "distance_km,cumulative_population,net_density_per_km2\n";
      for (const auto& point : curve) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.3f,%.6f,%.6f", point.distance_km,
                      point.cumulative_population, point.net_density_per_km2);
        out << buf << '\n';
      }
      std::cout << "wrote " << curve.size() << " rings to " << curve_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
