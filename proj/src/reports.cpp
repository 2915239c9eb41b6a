#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dynacc/pipeline.hpp"
#include "dynacc/time_of_day.hpp"

namespace fs = std::filesystem;

namespace dynacc {

namespace {

std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string instant_column(double minute) {
  const long long m = std::llround(minute);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "t%02lld%02lld", m / 60, m % 60);
  return buf;
}

}  // namespace

void write_reports(const RunResult& result, const std::string& output_dir) {
  fs::create_directories(output_dir);
  const fs::path dir(output_dir);

  {
    auto out = open_out(dir / "global_profile.csv");
    out << "instant,mpu,relative\n";
    const std::vector<double> relative = result.global.relative();
    for (std::size_t t = 0; t < result.instants.size(); ++t) {
      out << format_hhmm(result.instants[t]) << ',' << fmt(result.global.values[t], 6) << ','
          << fmt(relative[t], 9) << '\n';
    }
  }

  {
    auto out = open_out(dir / "global_metrics.csv");
    out << "freeflow_global_mpu,max_global_mpu,mean_global_mpu,median_global_mpu,"
           "pct_mean_of_max,pct_median_of_max,morning_peak,afternoon_peak,"
           "max_cell_freeflow_mpu,pct_cells_above_80pct_max,pct_cells_worst_morning,"
           "pct_cells_worst_afternoon\n";
    out << fmt(result.freeflow_global, 6) << ',' << fmt(result.metrics.max, 6) << ','
        << fmt(result.metrics.mean, 6) << ',' << fmt(result.metrics.median, 6) << ','
        << fmt(result.metrics.pct_mean_of_max, 2) << ','
        << fmt(result.metrics.pct_median_of_max, 2) << ','
        << format_hhmm(result.metrics.morning_peak_minute) << ','
        << format_hhmm(result.metrics.afternoon_peak_minute) << ','
        << fmt(result.max_cell_freeflow, 6) << ',' << fmt(result.pct_cells_above_80pct_max, 2)
        << ',' << fmt(result.pct_cells_worst_morning, 2) << ','
        << fmt(result.pct_cells_worst_afternoon, 2) << '\n';
  }

  {
    auto out = open_out(dir / "zone_series.csv");
    out << "zone_id";
    for (const double instant : result.instants) {
      out << ',' << instant_column(instant);
    }
    out << '\n';
    for (const AccessibilitySeries& series : result.series) {
      out << result.analysis_zones[series.zone].id;
      for (const double v : series.values) {
        out << ',' << fmt(v, 6);
      }
      out << '\n';
    }
  }

  {
    auto out = open_out(dir / "zone_metrics.csv");
    out << "zone_id,freeflow_mpu,morning_peak,morning_ratio,afternoon_peak,afternoon_ratio,"
           "worst_instant,worst_is_morning,peak_gap,cluster_label\n";
    for (const ZoneMetrics& row : result.zone_rows) {
      out << row.zone_id << ',' << fmt(row.freeflow_access, 6) << ','
          << format_hhmm(row.morning_peak_minute) << ',' << fmt(row.morning_ratio, 9) << ','
          << format_hhmm(row.afternoon_peak_minute) << ',' << fmt(row.afternoon_ratio, 9)
          << ',' << format_hhmm(row.worst_minute) << ',' << (row.worst_is_morning ? 1 : 0)
          << ',' << fmt(row.gap, 9) << ',' << row.cluster_label << '\n';
    }
  }

  {
    nlohmann::json features = nlohmann::json::array();
    // zone_rows align with study_indices; map analysis index -> study slot.
    std::vector<int> study_slot(result.analysis_zones.size(), -1);
    for (std::size_t s = 0; s < result.study_indices.size(); ++s) {
      study_slot[result.study_indices[s]] = static_cast<int>(s);
    }
    for (std::size_t i = 0; i < result.analysis_zones.size(); ++i) {
      const Zone& zone = result.analysis_zones[i];
      const double x0 = zone.col * kZoneSizeMeters;
      const double y0 = zone.row * kZoneSizeMeters;
      nlohmann::json feature{
          {"type", "Feature"},
          {"geometry",
           {{"type", "Polygon"},
            {"coordinates",
             {{{x0, y0},
               {x0 + kZoneSizeMeters, y0},
               {x0 + kZoneSizeMeters, y0 + kZoneSizeMeters},
               {x0, y0 + kZoneSizeMeters},
               {x0, y0}}}}}},
      };
      nlohmann::json properties{
          {"zone_id", zone.id},
          {"col", zone.col},
          {"row", zone.row},
          {"population", zone.population},
          {"in_study", zone.in_study_area},
          {"distance_downtown_km",
           distance_to_downtown_km(zone, result.config.downtown_x, result.config.downtown_y)},
      };
      if (study_slot[i] >= 0) {
        const ZoneMetrics& m = result.zone_rows[study_slot[i]];
        properties["freeflow_mpu"] = m.freeflow_access;
        properties["morning_peak"] = format_hhmm(m.morning_peak_minute);
        properties["morning_ratio"] = m.morning_ratio;
        properties["afternoon_peak"] = format_hhmm(m.afternoon_peak_minute);
        properties["afternoon_ratio"] = m.afternoon_ratio;
        properties["worst_instant"] = format_hhmm(m.worst_minute);
        properties["worst_is_morning"] = m.worst_is_morning;
        properties["peak_gap"] = m.gap;
        properties["cluster_label"] = m.cluster_label;
      }
      feature["properties"] = std::move(properties);
      features.push_back(std::move(feature));
    }
    const nlohmann::json doc{{"type", "FeatureCollection"},
                             {"crs_name", result.config.crs_name},
                             {"features", std::move(features)}};
    auto out = open_out(dir / "zones.geojson");
    out << doc.dump(2) << '\n';
  }

  {
    auto out = open_out(dir / "cumulative_population.csv");
    out << "distance_km,cumulative_population,net_density_per_km2\n";
    for (const CumulativeCurvePoint& point : result.curve) {
      out << fmt(point.distance_km, 3) << ',' << fmt(point.cumulative_population, 6) << ','
          << fmt(point.net_density_per_km2, 6) << '\n';
    }
  }

  write_reference_profiles(result.references, (dir / "references.csv").string());

  {
    auto out = open_out(dir / "fifo_repair.csv");
    out << "link_id,breakpoints_changed,max_arrival_shift_min\n";
    for (const FifoRepairReport::LinkRepair& entry : result.repair.repaired_links) {
      out << entry.link_id << ',' << entry.breakpoints_changed << ','
          << fmt(entry.max_arrival_shift_min, 9) << '\n';
    }
  }
}

}  // namespace dynacc
