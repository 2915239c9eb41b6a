#include "dynacc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dynacc/time_of_day.hpp"

namespace fs = std::filesystem;

namespace dynacc {

namespace {

std::string fmt(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string where(std::size_t row_index) const {
    return path + " row " + std::to_string(row_index + 2);
  }
};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  CsvTable table;
  table.path = path;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (!have_header) {
      table.header = split_line(line);
      have_header = true;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  if (!have_header) {
    throw std::runtime_error(path + ": file is empty");
  }
  return table;
}

void expect_header(const CsvTable& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string want;
    for (const std::string& col : expected) {
      want += want.empty() ? col : "," + col;
    }
    throw std::runtime_error(table.path + ": unexpected header, expected '" + want + "'");
  }
}

void expect_columns(const CsvTable& table, std::size_t row, std::size_t count) {
  if (table.rows[row].size() != count) {
    throw std::runtime_error(table.where(row) + ": expected " + std::to_string(count) +
                             " columns, got " + std::to_string(table.rows[row].size()));
  }
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size() || !std::isfinite(value)) {
      throw std::invalid_argument(text);
    }
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": invalid number '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& context) {
  try {
    std::size_t consumed = 0;
    const long long value = std::stoll(text, &consumed);
    if (consumed != text.size()) {
      throw std::invalid_argument(text);
    }
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": invalid integer '" + text + "'");
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

/// Column names of the profile file: p0430, p0435, ..., p2120.
std::vector<std::string> profile_header() {
  std::vector<std::string> header{"id"};
  for (int k = 0; k < kProfileSize; ++k) {
    const int minute = static_cast<int>(kProfileWindowStart) + k * kProfileStepMinutes;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "p%02d%02d", minute / 60, minute % 60);
    header.emplace_back(buf);
  }
  return header;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  const fs::path base = fs::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    if (p.empty()) {
      return p;
    }
    const fs::path candidate(p);
    return candidate.is_absolute() ? p : (base / candidate).string();
  };

  ScenarioConfig cfg;
  bool have_downtown_x = false, have_downtown_y = false;
  bool have_study[4] = {false, false, false, false};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = path + " line " + std::to_string(line_no);

    if (key == "nodes") {
      cfg.nodes_path = resolve(value);
    } else if (key == "links") {
      cfg.links_path = resolve(value);
    } else if (key == "profiles") {
      cfg.profiles_path = resolve(value);
    } else if (key == "restrictions") {
      cfg.restrictions_path = resolve(value);
    } else if (key == "population") {
      cfg.population_path = resolve(value);
    } else if (key == "beta") {
      cfg.beta = parse_double(value, where);
    } else if (key == "schedule_start") {
      cfg.schedule.start_minute = parse_hhmm(value);
    } else if (key == "schedule_step_min") {
      cfg.schedule.step_minutes = parse_double(value, where);
    } else if (key == "schedule_count") {
      cfg.schedule.count = static_cast<int>(parse_int(value, where));
    } else if (key == "connector_speed_kmh") {
      cfg.connector_speed_kmh = parse_double(value, where);
    } else if (key == "morning_window_start") {
      cfg.peak_windows.morning_start = parse_hhmm(value);
    } else if (key == "morning_window_end") {
      cfg.peak_windows.morning_end = parse_hhmm(value);
    } else if (key == "afternoon_window_start") {
      cfg.peak_windows.afternoon_start = parse_hhmm(value);
    } else if (key == "afternoon_window_end") {
      cfg.peak_windows.afternoon_end = parse_hhmm(value);
    } else if (key == "buffer_threshold_min") {
      cfg.buffer_threshold_minutes = parse_double(value, where);
    } else if (key == "downtown_x") {
      cfg.downtown_x = parse_double(value, where);
      have_downtown_x = true;
    } else if (key == "downtown_y") {
      cfg.downtown_y = parse_double(value, where);
      have_downtown_y = true;
    } else if (key == "study_min_x") {
      cfg.study_extent.min_x = parse_double(value, where);
      have_study[0] = true;
    } else if (key == "study_min_y") {
      cfg.study_extent.min_y = parse_double(value, where);
      have_study[1] = true;
    } else if (key == "study_max_x") {
      cfg.study_extent.max_x = parse_double(value, where);
      have_study[2] = true;
    } else if (key == "study_max_y") {
      cfg.study_extent.max_y = parse_double(value, where);
      have_study[3] = true;
    } else if (key == "output_dir") {
      cfg.output_dir = resolve(value);
    } else if (key == "include_buffer_destinations") {
      cfg.include_buffer_destinations = (value == "1" || value == "true");
    } else if (key == "ring_width_km") {
      cfg.ring_width_km = parse_double(value, where);
    } else if (key == "cluster_k") {
      cfg.cluster_k = static_cast<int>(parse_int(value, where));
    } else if (key == "cluster_seed") {
      cfg.cluster_seed = static_cast<std::uint64_t>(parse_int(value, where));
    } else if (key == "crs_name") {
      cfg.crs_name = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(parse_int(value, where));
    } else {
      throw std::runtime_error(where + ": unknown config key '" + key + "'");
    }
  }

  for (const auto& [present, name] :
       {std::pair{!cfg.nodes_path.empty(), "nodes"}, {!cfg.links_path.empty(), "links"},
        {!cfg.profiles_path.empty(), "profiles"},
        {!cfg.population_path.empty(), "population"}, {have_downtown_x, "downtown_x"},
        {have_downtown_y, "downtown_y"}, {have_study[0], "study_min_x"},
        {have_study[1], "study_min_y"}, {have_study[2], "study_max_x"},
        {have_study[3], "study_max_y"}}) {
    if (!present) {
      throw std::runtime_error(path + ": missing required key '" + std::string(name) + "'");
    }
  }
  if (!(cfg.beta > 0.0)) {
    throw std::runtime_error(path + ": beta must be positive");
  }
  cfg.schedule.validate();
  if (!(cfg.connector_speed_kmh > 0.0)) {
    throw std::runtime_error(path + ": connector speed must be positive");
  }
  if (cfg.cluster_k < 1) {
    throw std::runtime_error(path + ": cluster_k must be at least 1");
  }
  return cfg;
}

Scenario load_scenario(const std::string& config_path) {
  ScenarioConfig cfg = load_config(config_path);

  // Nodes.
  CsvTable node_table = read_csv(cfg.nodes_path);
  expect_header(node_table, {"id", "x", "y"});
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::uint32_t> node_index;
  nodes.reserve(node_table.rows.size());
  for (std::size_t r = 0; r < node_table.rows.size(); ++r) {
    expect_columns(node_table, r, 3);
    const auto& row = node_table.rows[r];
    Node node;
    node.id = row[0];
    node.x = parse_double(row[1], node_table.where(r));
    node.y = parse_double(row[2], node_table.where(r));
    if (!node_index.emplace(node.id, static_cast<std::uint32_t>(nodes.size())).second) {
      throw std::runtime_error(node_table.where(r) + ": duplicate node id '" + node.id + "'");
    }
    nodes.push_back(std::move(node));
  }

  // Speed profiles.
  CsvTable profile_table = read_csv(cfg.profiles_path);
  expect_header(profile_table, profile_header());
  std::vector<SpeedProfile> profiles;
  std::unordered_map<std::string, std::int32_t> profile_index;
  profiles.reserve(profile_table.rows.size());
  for (std::size_t r = 0; r < profile_table.rows.size(); ++r) {
    const auto& row = profile_table.rows[r];
    if (row.size() != static_cast<std::size_t>(kProfileSize) + 1) {
      throw std::runtime_error(profile_table.where(r) + ": profile length " +
                               std::to_string(row.size() - 1) + ", expected " +
                               std::to_string(kProfileSize));
    }
    std::vector<double> values(kProfileSize);
    for (int k = 0; k < kProfileSize; ++k) {
      values[k] = parse_double(row[k + 1], profile_table.where(r));
    }
    try {
      SpeedProfile profile(row[0], std::move(values));
      if (!profile_index.emplace(row[0], static_cast<std::int32_t>(profiles.size())).second) {
        throw std::runtime_error("duplicate profile id '" + row[0] + "'");
      }
      profiles.push_back(std::move(profile));
    } catch (const std::exception& e) {
      throw std::runtime_error(profile_table.where(r) + ": " + e.what());
    }
  }

  // Links. A oneway=0 row expands into the forward link plus a reverse link
  // with "#r" appended to its id.
  CsvTable link_table = read_csv(cfg.links_path);
  expect_header(link_table,
                {"id", "from", "to", "length_m", "freeflow_kmh", "frc", "oneway", "profile_id"});
  std::vector<Link> links;
  std::unordered_map<std::string, std::uint32_t> link_index;
  const auto add_link = [&](Link link, const std::string& where) {
    if (!link_index.emplace(link.id, static_cast<std::uint32_t>(links.size())).second) {
      throw std::runtime_error(where + ": duplicate link id '" + link.id + "'");
    }
    links.push_back(std::move(link));
  };
  for (std::size_t r = 0; r < link_table.rows.size(); ++r) {
    expect_columns(link_table, r, 8);
    const auto& row = link_table.rows[r];
    const std::string where = link_table.where(r);
    Link link;
    link.id = row[0];
    const auto from_it = node_index.find(row[1]);
    const auto to_it = node_index.find(row[2]);
    if (from_it == node_index.end() || to_it == node_index.end()) {
      throw std::runtime_error(where + ": link '" + link.id + "' references unknown node '" +
                               (from_it == node_index.end() ? row[1] : row[2]) + "'");
    }
    link.from = from_it->second;
    link.to = to_it->second;
    if (link.from == link.to) {
      throw std::runtime_error(where + ": link '" + link.id + "' is a self-loop");
    }
    link.length_m = parse_double(row[3], where);
    link.freeflow_kmh = parse_double(row[4], where);
    if (!(link.length_m > 0.0)) {
      throw std::runtime_error(where + ": link '" + link.id + "' has non-positive length");
    }
    if (!(link.freeflow_kmh > 0.0)) {
      throw std::runtime_error(where + ": link '" + link.id + "' has non-positive speed");
    }
    link.road_class.frc = static_cast<int>(parse_int(row[5], where));
    if (link.road_class.frc < 0 || link.road_class.frc > 6) {
      throw std::runtime_error(where + ": link '" + link.id + "' has FRC outside 0..6");
    }
    const long long oneway = parse_int(row[6], where);
    if (oneway != 0 && oneway != 1) {
      throw std::runtime_error(where + ": oneway must be 0 or 1");
    }
    if (!row[7].empty()) {
      const auto profile_it = profile_index.find(row[7]);
      if (profile_it == profile_index.end()) {
        throw std::runtime_error(where + ": link '" + link.id +
                                 "' references unknown profile '" + row[7] + "'");
      }
      link.profile = profile_it->second;
    }
    if (oneway == 0) {
      Link reverse = link;
      reverse.id = link.id + "#r";
      std::swap(reverse.from, reverse.to);
      add_link(std::move(link), where);
      add_link(std::move(reverse), where);
    } else {
      add_link(std::move(link), where);
    }
  }

  // Turn restrictions (optional file).
  std::vector<TurnRestriction> restrictions;
  if (!cfg.restrictions_path.empty()) {
    CsvTable restriction_table = read_csv(cfg.restrictions_path);
    expect_header(restriction_table, {"via", "from_link", "to_link"});
    for (std::size_t r = 0; r < restriction_table.rows.size(); ++r) {
      expect_columns(restriction_table, r, 3);
      const auto& row = restriction_table.rows[r];
      const std::string where = restriction_table.where(r);
      const auto via_it = node_index.find(row[0]);
      if (via_it == node_index.end()) {
        throw std::runtime_error(where + ": unknown via node '" + row[0] + "'");
      }
      TurnRestriction restriction;
      restriction.via_node = via_it->second;
      for (const auto& [column, target] :
           {std::pair{1, &restriction.from_link}, {2, &restriction.to_link}}) {
        const auto link_it = link_index.find(row[column]);
        if (link_it == link_index.end()) {
          throw std::runtime_error(where + ": unknown link '" + row[column] + "'");
        }
        *target = link_it->second;
      }
      if (links[restriction.from_link].to != restriction.via_node) {
        throw std::runtime_error(where + ": link '" + row[1] + "' does not enter node '" +
                                 row[0] + "'");
      }
      if (links[restriction.to_link].from != restriction.via_node) {
        throw std::runtime_error(where + ": link '" + row[2] + "' does not leave node '" +
                                 row[0] + "'");
      }
      restrictions.push_back(restriction);
    }
  }

  // Population raster and grid.
  CsvTable population_table = read_csv(cfg.population_path);
  expect_header(population_table, {"cell_x", "cell_y", "pop"});
  std::vector<RasterCell> raster;
  raster.reserve(population_table.rows.size());
  for (std::size_t r = 0; r < population_table.rows.size(); ++r) {
    expect_columns(population_table, r, 3);
    const auto& row = population_table.rows[r];
    const std::string where = population_table.where(r);
    RasterCell cell;
    cell.x = parse_double(row[0], where);
    cell.y = parse_double(row[1], where);
    cell.population = parse_double(row[2], where);
    if (cell.population < 0.0) {
      throw std::runtime_error(where + ": negative population");
    }
    raster.push_back(cell);
  }
  if (raster.empty()) {
    throw std::runtime_error(cfg.population_path + ": population raster is empty");
  }
  BoundingBox hull{raster.front().x, raster.front().y, raster.front().x, raster.front().y};
  for (const RasterCell& cell : raster) {
    hull.min_x = std::min(hull.min_x, cell.x);
    hull.min_y = std::min(hull.min_y, cell.y);
    hull.max_x = std::max(hull.max_x, cell.x + kRasterSizeMeters);
    hull.max_y = std::max(hull.max_y, cell.y + kRasterSizeMeters);
  }
  std::vector<Zone> zones = build_grid(hull, raster);
  mark_study_area(zones, cfg.study_extent);

  Network network(std::move(nodes), std::move(profiles), std::move(links),
                  std::move(restrictions));
  FifoRepairReport repair = network.repair_fifo();
  return Scenario{std::move(network), std::move(zones), std::move(cfg), std::move(repair)};
}

std::vector<ReferenceProfile> read_reference_profiles(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.empty() || table.header.front() != "label" || table.header.size() < 2) {
    throw std::runtime_error(path + ": expected header label,t...");
  }
  const std::size_t n_values = table.header.size() - 1;
  std::vector<ReferenceProfile> references;
  references.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    expect_columns(table, r, n_values + 1);
    const auto& row = table.rows[r];
    ReferenceProfile ref;
    ref.label = row[0];
    for (const ReferenceProfile& existing : references) {
      if (existing.label == ref.label) {
        throw std::runtime_error(table.where(r) + ": duplicate label '" + ref.label + "'");
      }
    }
    ref.values.resize(n_values);
    double max_value = 0.0;
    for (std::size_t k = 0; k < n_values; ++k) {
      const double v = parse_double(row[k + 1], table.where(r));
      if (!(v > 0.0) || v > 1.0) {
        throw std::runtime_error(table.where(r) + ": relative value outside (0, 1]");
      }
      ref.values[k] = v;
      max_value = std::max(max_value, v);
    }
    if (std::abs(max_value - 1.0) > 1e-9) {
      throw std::runtime_error(table.where(r) + ": relative profile maximum is " +
                               std::to_string(max_value) + ", expected 1");
    }
    references.push_back(std::move(ref));
  }
  if (references.empty()) {
    throw std::runtime_error(path + ": no reference profiles");
  }
  return references;
}

void write_reference_profiles(const std::vector<ReferenceProfile>& references,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << "label";
  if (!references.empty()) {
    // Column names follow the 96-instant convention t0000,t0015,...
    for (std::size_t k = 0; k < references.front().values.size(); ++k) {
      const int minute = static_cast<int>(k * 15);
      char buf[8];
      std::snprintf(buf, sizeof(buf), "t%02d%02d", minute / 60, minute % 60);
      out << ',' << buf;
    }
  }
  out << '\n';
  for (const ReferenceProfile& ref : references) {
    out << ref.label;
    for (const double v : ref.values) {
      out << ',' << fmt(v, 9);
    }
    out << '\n';
  }
}

std::vector<NamedSeries> read_series_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.size() < 2) {
    throw std::runtime_error(path + ": expected an id column plus values");
  }
  const std::size_t n_values = table.header.size() - 1;
  std::vector<NamedSeries> result;
  result.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    expect_columns(table, r, n_values + 1);
    NamedSeries series;
    series.id = table.rows[r][0];
    series.values.resize(n_values);
    for (std::size_t k = 0; k < n_values; ++k) {
      series.values[k] = parse_double(table.rows[r][k + 1], table.where(r));
    }
    result.push_back(std::move(series));
  }
  return result;
}

void write_scenario_files(const SynthCity& city, const SynthSpec& spec,
                          const std::string& directory) {
  fs::create_directories(directory);
  const fs::path dir(directory);

  {
    std::ofstream out(dir / "nodes.csv");
    out << "id,x,y\n";
    for (const Node& node : city.nodes) {
      out << node.id << ',' << fmt(node.x, 3) << ',' << fmt(node.y, 3) << '\n';
    }
  }
  {
    std::ofstream out(dir / "links.csv");
    out << "id,from,to,length_m,freeflow_kmh,frc,oneway,profile_id\n";
    for (const Link& link : city.links) {
      out << link.id << ',' << city.nodes[link.from].id << ',' << city.nodes[link.to].id << ','
          << fmt(link.length_m, 3) << ',' << fmt(link.freeflow_kmh, 1) << ','
          << link.road_class.frc << ",1,"
          << (link.profile >= 0 ? city.profiles[link.profile].id() : "") << '\n';
    }
  }
  {
    std::ofstream out(dir / "profiles.csv");
    out << "id";
    for (int k = 0; k < kProfileSize; ++k) {
      const int minute = static_cast<int>(kProfileWindowStart) + k * kProfileStepMinutes;
      char buf[8];
      std::snprintf(buf, sizeof(buf), "p%02d%02d", minute / 60, minute % 60);
      out << ',' << buf;
    }
    out << '\n';
    for (const SpeedProfile& profile : city.profiles) {
      out << profile.id();
      for (const double v : profile.breakpoints()) {
        out << ',' << fmt(v, 9);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "restrictions.csv");
    out << "via,from_link,to_link\n";
  }
  {
    std::ofstream out(dir / "population.csv");
    out << "cell_x,cell_y,pop\n";
    for (const RasterCell& cell : city.raster) {
      out << fmt(cell.x, 0) << ',' << fmt(cell.y, 0) << ',' << fmt(cell.population, 0) << '\n';
    }
  }
  {
    std::ofstream out(dir / "scenario.cfg");
    out << "# synthetic ring-radial scenario (rings=" << spec.rings
        << " radials=" << spec.radials << " spacing_km=" << fmt(spec.ring_spacing_km, 3)
        << " seed=" << spec.seed << ")\n";
    out << "nodes = nodes.csv\n";
    out << "links = links.csv\n";
    out << "profiles = profiles.csv\n";
    out << "restrictions = restrictions.csv\n";
    out << "population = population.csv\n";
    out << "beta = 0.065\n";
    out << "schedule_start = 00:00\n";
    out << "schedule_step_min = 15\n";
    out << "schedule_count = 96\n";
    out << "connector_speed_kmh = 20\n";
    out << "buffer_threshold_min = 15\n";
    out << "downtown_x = " << fmt(city.downtown_x, 3) << '\n';
    out << "downtown_y = " << fmt(city.downtown_y, 3) << '\n';
    out << "study_min_x = " << fmt(city.study_extent.min_x, 3) << '\n';
    out << "study_min_y = " << fmt(city.study_extent.min_y, 3) << '\n';
    out << "study_max_x = " << fmt(city.study_extent.max_x, 3) << '\n';
    out << "study_max_y = " << fmt(city.study_extent.max_y, 3) << '\n';
    out << "output_dir = out\n";
  }
}

}  // namespace dynacc
