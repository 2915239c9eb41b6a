#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dynacc {

// Speed profiles cover 04:30 through 21:20 in 5-minute steps (203 samples).
// Outside that window every link runs at free flow.
inline constexpr double kProfileWindowStart = 270.0;
inline constexpr double kProfileWindowEnd = 1280.0;
inline constexpr int kProfileStepMinutes = 5;
inline constexpr int kProfileSize = 203;
inline constexpr int kProfileSegments = kProfileSize - 1;

struct Node {
  std::string id;
  double x = 0.0;  // projected planar meters (equal-area CRS)
  double y = 0.0;
};

/// Functional road classification level; this engine loads levels 0..6.
struct RoadClass {
  int frc = 6;
};

/// Per-link fraction-of-free-flow speed over the profile window.
class SpeedProfile {
 public:
  /// `fractions` must hold exactly 203 values in (0, 1].
  SpeedProfile(std::string id, std::vector<double> fractions);

  const std::string& id() const { return id_; }
  const std::vector<double>& breakpoints() const { return fractions_; }

  /// Fraction of free-flow speed for a vehicle entering at `minute_of_day`.
  /// Outside [04:30, 21:20] the fraction is 1; inside, the stored 5-minute
  /// samples are interpolated linearly. Values past the end of the day are
  /// treated as free flow as well (late trips simply run out of the window).
  double fraction_at(double minute_of_day) const;

 private:
  std::string id_;
  std::vector<double> fractions_;
};

struct Link {
  std::string id;
  std::uint32_t from = 0;  // node index
  std::uint32_t to = 0;    // node index
  double length_m = 0.0;
  double freeflow_kmh = 0.0;
  RoadClass road_class;
  std::int32_t profile = -1;  // index into Network::profiles(), -1 = free flow

  double freeflow_minutes() const { return length_m / 1000.0 / freeflow_kmh * 60.0; }
};

/// A banned movement from one link to another across a node.
struct TurnRestriction {
  std::uint32_t via_node = 0;
  std::uint32_t from_link = 0;
  std::uint32_t to_link = 0;
};

/// Entry-time-dependent traversal cost of one link, in minutes.
///
/// The raw function is tt(t) = freeflow_minutes / fraction(t): the traversal
/// speed is fixed at the entry instant. Because the fraction is interpolated
/// linearly between 5-minute samples, the arrival function a(t) = t + tt(t)
/// is piecewise rational and may decrease where speeds recover quickly, i.e.
/// the raw function is not necessarily FIFO. fifo_repaired() returns the
/// free-waiting lower envelope a'(t) = inf_{w>=0} (t + w + tt(t + w)), which
/// is non-decreasing, never later than the raw arrival, and identical to it
/// wherever the raw function already satisfies FIFO.
class TravelTimeFunction {
 public:
  TravelTimeFunction(double freeflow_minutes, const SpeedProfile* profile);

  double freeflow_minutes() const { return freeflow_minutes_; }
  bool repaired() const { return repaired_; }
  bool has_profile() const { return profile_ != nullptr; }

  /// Traversal minutes when entering the link at `entry_minute`.
  double travel_time(double entry_minute) const;

  /// Arrival minute when entering at `entry_minute`.
  double arrival(double entry_minute) const { return entry_minute + travel_time(entry_minute); }

  /// All breakpoint pairs t1 < t2 whose arrivals run backwards by more than
  /// `tolerance_minutes`. Empty result means FIFO holds on the breakpoint
  /// lattice (the continuous repair additionally covers the free-flow snap
  /// at the window end, which no breakpoint pair can see).
  std::vector<std::pair<double, double>> fifo_violations(double tolerance_minutes) const;

  /// Free-waiting lower envelope of the arrival function (see class docs).
  TravelTimeFunction fifo_repaired() const;

 private:
  // Minimum arrival over entries strictly after `from_minute` up to the
  // segment's right end; +inf when the arrival only grows there.
  double tail_min_arrival(int segment, double from_minute, double fraction_here) const;
  double raw_travel_time(double entry_minute) const;

  double freeflow_minutes_ = 0.0;
  const SpeedProfile* profile_ = nullptr;
  bool repaired_ = false;
  // suffix_min_arrival_[k] = inf of the raw arrival over entries at or past
  // the right end of segment k (including waiting beyond the window).
  std::vector<double> suffix_min_arrival_;
};

struct FifoRepairReport {
  struct LinkRepair {
    std::uint32_t link = 0;
    std::string link_id;
    int breakpoints_changed = 0;
    double max_arrival_shift_min = 0.0;
  };
  std::vector<LinkRepair> repaired_links;  // only links that actually changed
  std::size_t links_total = 0;
  std::size_t profiled_links = 0;
  std::size_t breakpoints_total = 0;
  std::size_t breakpoints_changed = 0;
};

/// Immutable road network: nodes, shared speed profiles, directed links with
/// their travel-time functions, and turn restrictions.
class Network {
 public:
  Network(std::vector<Node> nodes, std::vector<SpeedProfile> profiles, std::vector<Link> links,
          std::vector<TurnRestriction> restrictions);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<SpeedProfile>& profiles() const { return profiles_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<TurnRestriction>& restrictions() const { return restrictions_; }

  const TravelTimeFunction& travel_time_fn(std::size_t link) const {
    return functions_[link];
  }

  const std::vector<std::uint32_t>& out_links(std::uint32_t node) const {
    return out_links_[node];
  }
  const std::vector<std::uint32_t>& in_links(std::uint32_t node) const {
    return in_links_[node];
  }
  bool node_has_incident_link(std::uint32_t node) const {
    return !out_links_[node].empty() || !in_links_[node].empty();
  }

  /// Replaces every link function with its free-waiting lower envelope.
  /// Call once after construction; queries before repair see raw functions.
  FifoRepairReport repair_fifo();

 private:
  std::vector<Node> nodes_;
  std::vector<SpeedProfile> profiles_;
  std::vector<Link> links_;
  std::vector<TurnRestriction> restrictions_;
  std::vector<TravelTimeFunction> functions_;
  std::vector<std::vector<std::uint32_t>> out_links_;
  std::vector<std::vector<std::uint32_t>> in_links_;
};

}  // namespace dynacc
