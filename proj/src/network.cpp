#include "dynacc/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dynacc {

namespace {

constexpr double kTravelInfinity = std::numeric_limits<double>::infinity();

double breakpoint_minute(int k) {
  return kProfileWindowStart + static_cast<double>(k) * kProfileStepMinutes;
}

}  // namespace

SpeedProfile::SpeedProfile(std::string id, std::vector<double> fractions)
    : id_(std::move(id)), fractions_(std::move(fractions)) {
  if (fractions_.size() != static_cast<std::size_t>(kProfileSize)) {
    throw std::runtime_error("profile '" + id_ + "': expected " +
                             std::to_string(kProfileSize) + " values, got " +
                             std::to_string(fractions_.size()));
  }
  for (std::size_t i = 0; i < fractions_.size(); ++i) {
    const double v = fractions_[i];
    if (!(v > 0.0) || v > 1.0 || !std::isfinite(v)) {
      throw std::runtime_error("profile '" + id_ + "': value " + std::to_string(v) +
                               " at breakpoint " + std::to_string(i) + " outside (0, 1]");
    }
  }
}

double SpeedProfile::fraction_at(double minute_of_day) const {
  if (minute_of_day < kProfileWindowStart || minute_of_day > kProfileWindowEnd) {
    return 1.0;
  }
  const double pos = (minute_of_day - kProfileWindowStart) / kProfileStepMinutes;
  int k = static_cast<int>(pos);
  if (k >= kProfileSegments) {
    return fractions_.back();  // exactly 21:20
  }
  const double offset = pos - k;
  return fractions_[k] + (fractions_[k + 1] - fractions_[k]) * offset;
}

TravelTimeFunction::TravelTimeFunction(double freeflow_minutes, const SpeedProfile* profile)
    : freeflow_minutes_(freeflow_minutes), profile_(profile) {
  if (!(freeflow_minutes_ > 0.0) || !std::isfinite(freeflow_minutes_)) {
    throw std::invalid_argument("travel-time function needs a positive free-flow time");
  }
}

double TravelTimeFunction::raw_travel_time(double entry_minute) const {
  if (profile_ == nullptr) {
    return freeflow_minutes_;
  }
  return freeflow_minutes_ / profile_->fraction_at(entry_minute);
}

double TravelTimeFunction::tail_min_arrival(int segment, double from_minute,
                                            double fraction_here) const {
  // Within one 5-minute segment the fraction is linear, f(s) = f1 + m (s-t1),
  // so the arrival a(s) = s + C/f(s) has derivative 1 - C m / f(s)^2, which is
  // increasing in s. The arrival is therefore unimodal on the segment: it can
  // only decrease while f(s) < sqrt(C m).
  const double t1 = breakpoint_minute(segment);
  const double t2 = breakpoint_minute(segment + 1);
  const double f1 = profile_->breakpoints()[segment];
  const double f2 = profile_->breakpoints()[segment + 1];
  const double c = freeflow_minutes_;
  const double slope = (f2 - f1) / kProfileStepMinutes;
  if (slope <= 0.0) {
    return kTravelInfinity;  // speeds falling: arrival only grows from here
  }
  const double f_critical = std::sqrt(c * slope);
  if (fraction_here >= f_critical) {
    return kTravelInfinity;  // already past the segment's minimum
  }
  if (f2 <= f_critical) {
    return t2 + c / f2;  // arrival decreasing through the whole tail
  }
  const double t_critical = t1 + (f_critical - f1) / slope;
  return t_critical + c / f_critical;
}

double TravelTimeFunction::travel_time(double entry_minute) const {
  if (profile_ == nullptr) {
    return freeflow_minutes_;
  }
  if (!repaired_) {
    return raw_travel_time(entry_minute);
  }
  if (entry_minute < kProfileWindowStart || entry_minute > kProfileWindowEnd) {
    return freeflow_minutes_;
  }
  int segment = static_cast<int>((entry_minute - kProfileWindowStart) / kProfileStepMinutes);
  segment = std::min(segment, kProfileSegments - 1);
  const double fraction_here = profile_->fraction_at(entry_minute);
  const double no_wait = freeflow_minutes_ / fraction_here;
  const double plateau = std::min(tail_min_arrival(segment, entry_minute, fraction_here),
                                  suffix_min_arrival_[segment]);
  // Fall through to the raw value bitwise unless waiting strictly helps.
  const double waited = plateau - entry_minute;
  return waited < no_wait ? waited : no_wait;
}

std::vector<std::pair<double, double>> TravelTimeFunction::fifo_violations(
    double tolerance_minutes) const {
  std::vector<std::pair<double, double>> violations;
  if (profile_ == nullptr) {
    return violations;
  }
  std::vector<double> arrivals(kProfileSize);
  for (int k = 0; k < kProfileSize; ++k) {
    arrivals[k] = arrival(breakpoint_minute(k));
  }
  for (int i = 0; i < kProfileSize; ++i) {
    for (int j = i + 1; j < kProfileSize; ++j) {
      if (arrivals[i] > arrivals[j] + tolerance_minutes) {
        violations.emplace_back(breakpoint_minute(i), breakpoint_minute(j));
      }
    }
  }
  return violations;
}

TravelTimeFunction TravelTimeFunction::fifo_repaired() const {
  TravelTimeFunction repaired(freeflow_minutes_, profile_);
  repaired.repaired_ = true;
  if (profile_ == nullptr) {
    return repaired;
  }
  repaired.suffix_min_arrival_.resize(kProfileSegments);
  // Backward sweep. The tail term is the arrival when waiting until just
  // past 21:20 and traversing at free flow.
  double min_after = kProfileWindowEnd + freeflow_minutes_;
  for (int segment = kProfileSegments - 1; segment >= 0; --segment) {
    repaired.suffix_min_arrival_[segment] = min_after;
    const double t1 = breakpoint_minute(segment);
    const double f1 = profile_->breakpoints()[segment];
    const double full_min = std::min(t1 + freeflow_minutes_ / f1,
                                     repaired.tail_min_arrival(segment, t1, f1));
    min_after = std::min(min_after, full_min);
  }
  return repaired;
}

Network::Network(std::vector<Node> nodes, std::vector<SpeedProfile> profiles,
                 std::vector<Link> links, std::vector<TurnRestriction> restrictions)
    : nodes_(std::move(nodes)),
      profiles_(std::move(profiles)),
      links_(std::move(links)),
      restrictions_(std::move(restrictions)) {
  functions_.reserve(links_.size());
  out_links_.resize(nodes_.size());
  in_links_.resize(nodes_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (link.from >= nodes_.size() || link.to >= nodes_.size()) {
      throw std::runtime_error("link '" + link.id + "': node index out of range");
    }
    if (!(link.length_m > 0.0)) {
      throw std::runtime_error("link '" + link.id + "': length must be positive");
    }
    if (!(link.freeflow_kmh > 0.0)) {
      throw std::runtime_error("link '" + link.id + "': free-flow speed must be positive");
    }
    if (link.road_class.frc < 0 || link.road_class.frc > 6) {
      throw std::runtime_error("link '" + link.id + "': FRC outside 0..6");
    }
    const SpeedProfile* profile = nullptr;
    if (link.profile >= 0) {
      if (static_cast<std::size_t>(link.profile) >= profiles_.size()) {
        throw std::runtime_error("link '" + link.id + "': profile index out of range");
      }
      profile = &profiles_[link.profile];
    }
    functions_.emplace_back(link.freeflow_minutes(), profile);
    out_links_[link.from].push_back(static_cast<std::uint32_t>(i));
    in_links_[link.to].push_back(static_cast<std::uint32_t>(i));
  }
  for (const TurnRestriction& r : restrictions_) {
    if (r.from_link >= links_.size() || r.to_link >= links_.size() ||
        r.via_node >= nodes_.size()) {
      throw std::runtime_error("turn restriction references unknown link or node");
    }
    if (links_[r.from_link].to != r.via_node || links_[r.to_link].from != r.via_node) {
      throw std::runtime_error("turn restriction (via node '" + nodes_[r.via_node].id +
                               "') does not match link endpoints");
    }
  }
}

FifoRepairReport Network::repair_fifo() {
  FifoRepairReport report;
  report.links_total = links_.size();
  constexpr double kTol = 1e-9;
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    TravelTimeFunction& fn = functions_[i];
    if (!fn.has_profile()) {
      fn = fn.fifo_repaired();
      continue;
    }
    report.profiled_links += 1;
    report.breakpoints_total += static_cast<std::size_t>(kProfileSize);
    const TravelTimeFunction repaired = fn.fifo_repaired();
    FifoRepairReport::LinkRepair entry;
    entry.link = static_cast<std::uint32_t>(i);
    entry.link_id = links_[i].id;
    for (int k = 0; k < kProfileSize; ++k) {
      const double t = kProfileWindowStart + k * kProfileStepMinutes;
      const double shift = fn.travel_time(t) - repaired.travel_time(t);
      if (shift > kTol) {
        entry.breakpoints_changed += 1;
        entry.max_arrival_shift_min = std::max(entry.max_arrival_shift_min, shift);
      }
    }
    if (entry.breakpoints_changed > 0) {
      report.breakpoints_changed += static_cast<std::size_t>(entry.breakpoints_changed);
      report.repaired_links.push_back(entry);
    }
    fn = repaired;
  }
  return report;
}

}  // namespace dynacc
