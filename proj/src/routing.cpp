#include "dynacc/routing.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "dynacc/parallel.hpp"
#include "dynacc/time_of_day.hpp"

namespace dynacc {

std::vector<double> DepartureSchedule::instants() const {
  validate();
  std::vector<double> result(count);
  for (int i = 0; i < count; ++i) {
    result[i] = start_minute + step_minutes * i;
  }
  return result;
}

void DepartureSchedule::validate() const {
  if (count < 1) {
    throw std::runtime_error("departure schedule needs at least one instant");
  }
  if (!(step_minutes > 0.0)) {
    throw std::runtime_error("departure schedule step must be positive");
  }
  if (start_minute < 0.0 || start_minute + step_minutes * (count - 1) >= kMinutesPerDay) {
    throw std::runtime_error("departure schedule must stay within one day");
  }
}

SearchGraph::SearchGraph(const Network& network, std::vector<ZoneAttachment> attachments)
    : network_(&network), attachments_(std::move(attachments)) {
  for (const ZoneAttachment& a : attachments_) {
    if (a.node >= network.nodes().size()) {
      throw std::runtime_error("zone attachment references unknown node");
    }
  }
  // Banned movements, keyed by (from_link, to_link). Restrictions were
  // validated against the via node at network construction.
  std::unordered_set<std::uint64_t> banned;
  banned.reserve(network.restrictions().size() * 2);
  for (const TurnRestriction& r : network.restrictions()) {
    banned.insert((static_cast<std::uint64_t>(r.from_link) << 32) | r.to_link);
  }
  const std::size_t n_links = network.links().size();
  transition_offsets_.assign(n_links + 1, 0);
  for (std::size_t i = 0; i < n_links; ++i) {
    const std::uint32_t via = network.links()[i].to;
    std::size_t allowed = 0;
    for (const std::uint32_t next : network.out_links(via)) {
      const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | next;
      if (!banned.contains(key)) {
        ++allowed;
      }
    }
    transition_offsets_[i + 1] = transition_offsets_[i] + allowed;
  }
  transition_targets_.resize(transition_offsets_.back());
  for (std::size_t i = 0; i < n_links; ++i) {
    const std::uint32_t via = network.links()[i].to;
    std::size_t cursor = transition_offsets_[i];
    for (const std::uint32_t next : network.out_links(via)) {
      const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | next;
      if (!banned.contains(key)) {
        transition_targets_[cursor++] = next;
      }
    }
  }
}

std::size_t SearchGraph::transition_count() const { return transition_targets_.size(); }

namespace {

double link_arrival(const Network& net, std::uint32_t link, double entry, bool freeflow) {
  const TravelTimeFunction& fn = net.travel_time_fn(link);
  return entry + (freeflow ? fn.freeflow_minutes() : fn.travel_time(entry));
}

// Min-heap on (arrival, state); equal arrivals pop the lowest state first.
struct HeapOrder {
  bool operator()(const std::pair<double, std::uint32_t>& a,
                  const std::pair<double, std::uint32_t>& b) const {
    return a > b;
  }
};

ArrivalLabels run_query(const SearchGraph& graph,
                        std::span<const std::uint32_t> origin_zones, double depart_minute,
                        const QueryOptions& options, RoutingWorkspace* workspace) {
  const Network& net = graph.network();
  RoutingWorkspace local;
  RoutingWorkspace& ws = workspace != nullptr ? *workspace : local;
  ws.best_arrival.assign(graph.state_count(), kUnreachable);
  ws.settled.assign(graph.state_count(), 0);
  ws.heap.clear();

  const auto push = [&ws](double arrival, std::uint32_t state) {
    ws.heap.emplace_back(arrival, state);
    std::push_heap(ws.heap.begin(), ws.heap.end(), HeapOrder{});
  };

  // Seed: leave each origin centroid through its connector, then enter every
  // outgoing link of the attachment node.
  for (const std::uint32_t zone : origin_zones) {
    const ZoneAttachment& at = graph.attachment(zone);
    const double node_time = depart_minute + at.connector_minutes;
    for (const std::uint32_t link : net.out_links(at.node)) {
      const double arrival = link_arrival(net, link, node_time, options.freeflow);
      if (arrival < ws.best_arrival[link]) {
        ws.best_arrival[link] = arrival;
        push(arrival, link);
      }
    }
  }

  while (!ws.heap.empty()) {
    std::pop_heap(ws.heap.begin(), ws.heap.end(), HeapOrder{});
    const auto [arrival, state] = ws.heap.back();
    ws.heap.pop_back();
    if (ws.settled[state] != 0) {
      continue;
    }
    ws.settled[state] = 1;
    for (const std::uint32_t next : graph.successors(state)) {
      if (ws.settled[next] != 0) {
        continue;
      }
      const double next_arrival = link_arrival(net, next, arrival, options.freeflow);
      if (next_arrival < ws.best_arrival[next]) {
        ws.best_arrival[next] = next_arrival;
        push(next_arrival, next);
      }
    }
  }

  ArrivalLabels labels;
  labels.origin_zone = origin_zones.size() == 1 ? origin_zones.front() : 0;
  labels.depart_minute = depart_minute;
  labels.zone_arrival.assign(graph.zone_count(), kUnreachable);

  // Earliest arrival at each attachment node over its inbound links; origin
  // attachment nodes are also reachable by connector alone (no link used).
  for (std::size_t zone = 0; zone < graph.zone_count(); ++zone) {
    const ZoneAttachment& at = graph.attachment(zone);
    double node_arrival = kUnreachable;
    for (const std::uint32_t link : net.in_links(at.node)) {
      node_arrival = std::min(node_arrival, ws.best_arrival[link]);
    }
    for (const std::uint32_t origin : origin_zones) {
      const ZoneAttachment& origin_at = graph.attachment(origin);
      if (origin_at.node == at.node) {
        node_arrival = std::min(node_arrival, depart_minute + origin_at.connector_minutes);
      }
    }
    if (node_arrival != kUnreachable) {
      labels.zone_arrival[zone] = node_arrival + at.connector_minutes;
    }
  }
  for (const std::uint32_t origin : origin_zones) {
    labels.zone_arrival[origin] = depart_minute;  // intrazonal trips cost nothing
  }
  return labels;
}

}  // namespace

ArrivalLabels td_one_to_all(const SearchGraph& graph, std::uint32_t origin_zone,
                            double depart_minute, const QueryOptions& options,
                            RoutingWorkspace* workspace) {
  if (origin_zone >= graph.zone_count()) {
    throw std::invalid_argument("origin zone index out of range");
  }
  const ZoneAttachment& at = graph.attachment(origin_zone);
  if (graph.network().out_links(at.node).empty() &&
      graph.network().in_links(at.node).empty()) {
    throw std::runtime_error("origin zone is detached from the network");
  }
  const std::uint32_t origins[1] = {origin_zone};
  return run_query(graph, origins, depart_minute, options, workspace);
}

ArrivalLabels td_multi_source(const SearchGraph& graph,
                              std::span<const std::uint32_t> origin_zones,
                              double depart_minute, const QueryOptions& options,
                              RoutingWorkspace* workspace) {
  return run_query(graph, origin_zones, depart_minute, options, workspace);
}

CostTensor::CostTensor(std::vector<std::string> zone_ids, std::vector<double> departures)
    : zones_(zone_ids.size()), zone_ids_(std::move(zone_ids)),
      departures_(std::move(departures)) {
  data_.assign(zones_ * zones_ * departures_.size(), kUnreachable);
}

std::size_t CostTensor::index_of(const std::string& zone_id) const {
  for (std::size_t i = 0; i < zone_ids_.size(); ++i) {
    if (zone_ids_[i] == zone_id) {
      return i;
    }
  }
  throw std::invalid_argument("unknown zone id '" + zone_id + "'");
}

CostTensor od_cost_tensor(const SearchGraph& graph, std::span<const Zone> zones,
                          const DepartureSchedule& schedule, unsigned threads,
                          const QueryOptions& options) {
  if (zones.size() != graph.zone_count()) {
    throw std::invalid_argument("zone list does not match the search graph");
  }
  std::vector<std::string> ids;
  ids.reserve(zones.size());
  for (const Zone& zone : zones) {
    ids.push_back(zone.id);
  }
  const std::vector<double> departures = schedule.instants();
  CostTensor tensor(std::move(ids), departures);
  const std::size_t n_zones = graph.zone_count();
  const std::size_t n_dep = departures.size();
  parallel_for(n_zones * n_dep, threads, [&](std::size_t task, RoutingWorkspace& ws) {
    const std::size_t origin = task / n_dep;
    const std::size_t dep_idx = task % n_dep;
    const ArrivalLabels labels = td_one_to_all(graph, static_cast<std::uint32_t>(origin),
                                               departures[dep_idx], options, &ws);
    std::span<double> row = tensor.mutable_row(origin, dep_idx);
    for (std::size_t j = 0; j < n_zones; ++j) {
      row[j] = labels.travel_minutes(j);
    }
    row[origin] = 0.0;
  });
  return tensor;
}

}  // namespace dynacc
