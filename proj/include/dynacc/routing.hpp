#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dynacc/network.hpp"
#include "dynacc/zone.hpp"

namespace dynacc {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// How a zone centroid hangs off the road network: its nearest node and the
/// fixed-speed connector time (one way, minutes). Connectors are untouched by
/// speed profiles so free-flow and congested runs stay comparable.
struct ZoneAttachment {
  std::uint32_t node = 0;
  double connector_minutes = 0.0;
};

/// Trip start instants; default is 96 departures every 15 minutes from 00:00.
struct DepartureSchedule {
  double start_minute = 0.0;
  double step_minutes = 15.0;
  int count = 96;

  std::vector<double> instants() const;
  void validate() const;
};

/// Edge-expanded search graph: one state per directed link, so a banned
/// (from_link, via, to_link) movement is simply a missing transition.
/// Zone centroids enter and leave through their attachment connectors.
class SearchGraph {
 public:
  SearchGraph(const Network& network, std::vector<ZoneAttachment> attachments);

  const Network& network() const { return *network_; }
  std::size_t state_count() const { return network_->links().size(); }
  std::size_t zone_count() const { return attachments_.size(); }
  const ZoneAttachment& attachment(std::size_t zone) const { return attachments_[zone]; }

  /// Number of allowed link-to-link movements (restrictions already removed).
  std::size_t transition_count() const;

  std::span<const std::uint32_t> successors(std::uint32_t link_state) const {
    return {transition_targets_.data() + transition_offsets_[link_state],
            transition_offsets_[link_state + 1] - transition_offsets_[link_state]};
  }

 private:
  const Network* network_;
  std::vector<ZoneAttachment> attachments_;
  std::vector<std::size_t> transition_offsets_;  // CSR over link states
  std::vector<std::uint32_t> transition_targets_;
};

/// One-to-all result: arrival minute per target zone, kUnreachable if no path.
/// The origin zone itself is reached at the departure instant (zero cost).
struct ArrivalLabels {
  std::uint32_t origin_zone = 0;
  double depart_minute = 0.0;
  std::vector<double> zone_arrival;

  double travel_minutes(std::size_t zone) const {
    return zone_arrival[zone] == kUnreachable ? kUnreachable
                                              : zone_arrival[zone] - depart_minute;
  }
};

struct QueryOptions {
  bool freeflow = false;  // evaluate every link at its free-flow time
};

/// Scratch buffers reused across queries by the same worker.
class RoutingWorkspace {
 public:
  std::vector<double> best_arrival;
  std::vector<char> settled;
  std::vector<std::pair<double, std::uint32_t>> heap;
};

/// Exact time-dependent one-to-all shortest paths (label-setting Dijkstra
/// over link states). Optimal on FIFO-repaired networks; ties between equal
/// arrivals break toward the lowest state index so results are deterministic.
ArrivalLabels td_one_to_all(const SearchGraph& graph, std::uint32_t origin_zone,
                            double depart_minute, const QueryOptions& options = {},
                            RoutingWorkspace* workspace = nullptr);

/// Minimum arrival per zone over a set of simultaneous origins.
ArrivalLabels td_multi_source(const SearchGraph& graph,
                              std::span<const std::uint32_t> origin_zones, double depart_minute,
                              const QueryOptions& options = {},
                              RoutingWorkspace* workspace = nullptr);

/// Dense origin x destination x departure travel-time tensor, minutes.
/// Diagonal entries are forced to zero (intrazonal trips cost nothing).
class CostTensor {
 public:
  CostTensor(std::vector<std::string> zone_ids, std::vector<double> departures);

  std::size_t zone_count() const { return zones_; }
  const std::vector<std::string>& zone_ids() const { return zone_ids_; }
  std::size_t index_of(const std::string& zone_id) const;
  const std::vector<double>& departures() const { return departures_; }

  double cost(std::size_t origin, std::size_t destination, std::size_t departure) const {
    return data_[index(origin, departure)* zones_ + destination];
  }
  std::span<const double> row(std::size_t origin, std::size_t departure) const {
    return {data_.data() + index(origin, departure) * zones_, zones_};
  }
  std::span<double> mutable_row(std::size_t origin, std::size_t departure) {
    return {data_.data() + index(origin, departure) * zones_, zones_};
  }

 private:
  std::size_t index(std::size_t origin, std::size_t departure) const {
    return origin * departures_.size() + departure;
  }
  std::size_t zones_;
  std::vector<std::string> zone_ids_;
  std::vector<double> departures_;
  std::vector<double> data_;
};

/// Runs one td_one_to_all per (origin, departure) pair, fanned out over
/// `threads` workers. Every slot is position-addressed, so the result is
/// bit-identical regardless of worker count. `zones` supplies the id
/// registry and must match the graph's attachments.
CostTensor od_cost_tensor(const SearchGraph& graph, std::span<const Zone> zones,
                          const DepartureSchedule& schedule, unsigned threads = 1,
                          const QueryOptions& options = {});

}  // namespace dynacc
