#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dynacc/network.hpp"
#include "support/random_scenario.hpp"

using namespace dynacc;

namespace {

std::vector<double> flat_profile(double value) {
  return std::vector<double>(kProfileSize, value);
}

SpeedProfile make_profile(std::vector<double> values) {
  return SpeedProfile("p", std::move(values));
}

}  // namespace

TEST_CASE("profile fraction is 1 outside the window") {
  auto values = flat_profile(0.5);
  const SpeedProfile profile = make_profile(values);
  CHECK(profile.fraction_at(180.0) == 1.0);  // 03:00
  CHECK(profile.fraction_at(0.0) == 1.0);
  CHECK(profile.fraction_at(1281.0) == 1.0);
  CHECK(profile.fraction_at(1439.5) == 1.0);
}

TEST_CASE("profile fraction hits stored breakpoints exactly") {
  auto values = flat_profile(1.0);
  values[40] = 0.5;
  const SpeedProfile profile = make_profile(values);
  const double t40 = kProfileWindowStart + 40.0 * kProfileStepMinutes;
  CHECK(profile.fraction_at(t40) == 0.5);
  CHECK(profile.fraction_at(kProfileWindowStart) == 1.0);
  // Last breakpoint, exactly 21:20.
  auto tail = flat_profile(1.0);
  tail[kProfileSize - 1] = 0.75;
  const SpeedProfile tail_profile = make_profile(tail);
  CHECK(tail_profile.fraction_at(kProfileWindowEnd) == 0.75);
}

TEST_CASE("profile fraction interpolates linearly between breakpoints") {
  auto values = flat_profile(1.0);
  values[10] = 0.4;
  values[11] = 0.6;
  const SpeedProfile profile = make_profile(values);
  const double t10 = kProfileWindowStart + 10.0 * kProfileStepMinutes;
  CHECK(profile.fraction_at(t10 + 2.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(profile.fraction_at(t10 + 1.25) == doctest::Approx(0.45).epsilon(1e-12));
  // Continuity across the segment border.
  CHECK(profile.fraction_at(t10 + 5.0 - 1e-9) ==
        doctest::Approx(profile.fraction_at(t10 + 5.0)).epsilon(1e-6));
}

TEST_CASE("profile validation") {
  CHECK_THROWS(SpeedProfile("short", std::vector<double>(202, 1.0)));
  auto zero = flat_profile(1.0);
  zero[5] = 0.0;
  CHECK_THROWS(make_profile(zero));
  auto above = flat_profile(1.0);
  above[5] = 1.0001;
  CHECK_THROWS(make_profile(above));
}

TEST_CASE("entry travel time follows length, speed and fraction") {
  // 1 km at 60 km/h in free flow: one minute.
  const TravelTimeFunction unit(1.0 / 60.0 * 60.0, nullptr);
  CHECK(unit.travel_time(500.0) == 1.0);

  // Half speed doubles the time.
  const SpeedProfile half = make_profile(flat_profile(0.5));
  const TravelTimeFunction halved(1.0, &half);
  CHECK(halved.travel_time(500.0) == 2.0);
  CHECK(halved.travel_time(100.0) == 1.0);  // outside the window

  // 2.5 km at 50 km/h with fraction 0.8.
  const SpeedProfile p08 = make_profile(flat_profile(0.8));
  const TravelTimeFunction fn(2.5 / 50.0 * 60.0, &p08);
  CHECK(fn.travel_time(600.0) == doctest::Approx(3.75).epsilon(1e-12));
}

TEST_CASE("fifo check: constant profiles have no violations") {
  const SpeedProfile constant = make_profile(flat_profile(0.7));
  const TravelTimeFunction fn(12.0, &constant);
  CHECK(fn.fifo_violations(1e-9).empty());
  const TravelTimeFunction freeflow(5.0, nullptr);
  CHECK(freeflow.fifo_violations(1e-9).empty());
}

TEST_CASE("fifo check flags a sharp recovery on a long link") {
  auto values = flat_profile(1.0);
  values[100] = 0.25;
  const SpeedProfile step = make_profile(values);
  const TravelTimeFunction fn(10.0, &step);  // 10 free-flow minutes
  const auto violations = fn.fifo_violations(1e-9);
  CHECK(!violations.empty());

  // Independent 1-minute scan of the raw arrivals agrees that order breaks.
  bool scan_found = false;
  for (int t = 0; t < 1439 && !scan_found; ++t) {
    scan_found = fn.arrival(t) > fn.arrival(t + 1) + 1e-9;
  }
  CHECK(scan_found);
}

TEST_CASE("fifo repair is the identity on FIFO inputs") {
  // Gentle V shape ending back at 100%: FIFO everywhere, boundary included.
  std::vector<double> values(kProfileSize);
  for (int k = 0; k < kProfileSize; ++k) {
    values[k] = 1.0 - 0.4 * (1.0 - std::abs(k - 101.0) / 101.0);
  }
  values.front() = values.back() = 1.0;
  const SpeedProfile gentle = make_profile(values);
  const TravelTimeFunction fn(7.5, &gentle);
  REQUIRE(fn.fifo_violations(1e-9).empty());
  const TravelTimeFunction repaired = fn.fifo_repaired();
  int compared = 0;
  for (double t = 0.0; t < 1440.0; t += 0.25) {
    CHECK(repaired.travel_time(t) == fn.travel_time(t));
    ++compared;
  }
  CHECK(compared == 5760);
  CHECK(repaired.fifo_violations(1e-9).empty());

  const TravelTimeFunction freeflow(3.0, nullptr);
  const TravelTimeFunction freeflow_repaired = freeflow.fifo_repaired();
  CHECK(freeflow_repaired.travel_time(0.0) == 3.0);
  CHECK(freeflow_repaired.travel_time(900.0) == 3.0);
}

TEST_CASE("fifo repair flattens a violating step to the free-waiting envelope") {
  auto values = flat_profile(1.0);
  values[100] = 0.25;  // breakpoint at minute 770
  const SpeedProfile step = make_profile(values);
  const TravelTimeFunction raw(10.0, &step);
  const TravelTimeFunction repaired = raw.fifo_repaired();

  // Brute-force free-waiting envelope on integer minutes. The recovery
  // segment bottoms out at minute 775 (an integer), so the discretized
  // search is exact for integer departures here.
  for (int t = 700; t <= 820; ++t) {
    double brute = kUnreachable;
    for (int w = 0; t + w <= 1439; ++w) {
      brute = std::min(brute, t + w + raw.travel_time(t + w));
    }
    CHECK(repaired.arrival(t) == doctest::Approx(brute).epsilon(1e-12));
  }

  // Inside the violating stretch the arrival is pinned to the later,
  // earlier-arriving value: 775 + 10 free-flow minutes.
  CHECK(repaired.arrival(770.0) == doctest::Approx(785.0).epsilon(1e-12));
  CHECK(repaired.arrival(772.5) == doctest::Approx(785.0).epsilon(1e-12));
  CHECK(repaired.arrival(769.0) == doctest::Approx(785.0).epsilon(1e-12));
  // Before the stretch the raw function is untouched.
  CHECK(repaired.travel_time(766.0) == raw.travel_time(766.0));
  CHECK(repaired.fifo_violations(1e-9).empty());
}

TEST_CASE("fifo repair handles the snap back to free flow at the window end") {
  auto values = flat_profile(1.0);
  for (int k = 150; k < kProfileSize; ++k) {
    values[k] = 0.3;  // still congested at 21:20, free flow right after
  }
  const SpeedProfile tail = make_profile(values);
  const TravelTimeFunction raw(9.0, &tail);
  // No breakpoint pair can see the boundary drop, but a one-minute scan can.
  CHECK(raw.fifo_violations(1e-9).empty());
  CHECK(raw.arrival(kProfileWindowEnd) > raw.arrival(kProfileWindowEnd + 1.0) + 1e-9);

  const TravelTimeFunction repaired = raw.fifo_repaired();
  // Waiting past 21:20 caps the arrival at window end + free-flow time.
  CHECK(repaired.arrival(kProfileWindowEnd) ==
        doctest::Approx(kProfileWindowEnd + 9.0).epsilon(1e-12));
  CHECK(repaired.arrival(1279.0) <= kProfileWindowEnd + 9.0 + 1e-9);
  double previous = repaired.arrival(1250.0);
  for (double t = 1250.5; t < 1300.0; t += 0.5) {
    const double a = repaired.arrival(t);
    CHECK(a + 1e-9 >= previous);
    previous = a;
  }
}

TEST_CASE("repaired functions are monotone and bounded on random profiles") {
  std::mt19937_64 rng(20260809);
  for (int round = 0; round < 25; ++round) {
    const SpeedProfile profile = dynacc::testing::random_profile(rng, "r");
    std::uniform_real_distribution<double> freeflow(0.5, 30.0);
    const double c = freeflow(rng);
    const TravelTimeFunction repaired = TravelTimeFunction(c, &profile).fifo_repaired();
    double previous = repaired.arrival(0.0);
    for (int t = 1; t < 1440; ++t) {
      const double tt = repaired.travel_time(t);
      CHECK(tt >= c - 1e-9);  // congestion never beats free flow
      const double a = t + tt;
      CHECK(a + 1e-9 >= previous);
      previous = a;
    }
  }
}

TEST_CASE("repair never delays and only helps where FIFO broke") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 10; ++round) {
    const SpeedProfile profile = dynacc::testing::random_profile(rng, "r");
    const TravelTimeFunction raw(15.0, &profile);
    const TravelTimeFunction repaired = raw.fifo_repaired();
    for (double t = 0.0; t < 1440.0; t += 0.5) {
      CHECK(repaired.arrival(t) <= raw.arrival(t) + 1e-12);
    }
  }
}

TEST_CASE("scaling a constant profile scales travel time inversely") {
  for (const double base : {1.0, 0.8, 0.5}) {
    for (const double s : {0.9, 0.5, 0.25}) {
      const SpeedProfile original = make_profile(flat_profile(base));
      const SpeedProfile scaled = make_profile(flat_profile(base * s));
      const TravelTimeFunction fn(4.2, &original);
      const TravelTimeFunction fn_scaled(4.2, &scaled);
      for (const double t : {300.0, 777.0, 1200.0}) {
        CHECK(fn_scaled.travel_time(t) ==
              doctest::Approx(fn.travel_time(t) / s).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("network construction validates links and restrictions") {
  std::vector<Node> nodes{{"a", 0.0, 0.0}, {"b", 1000.0, 0.0}};
  std::vector<Link> links(1);
  links[0] = {"l0", 0, 1, 1000.0, 50.0, RoadClass{2}, -1};
  CHECK_NOTHROW(Network(nodes, {}, links, {}));

  auto bad_length = links;
  bad_length[0].length_m = 0.0;
  CHECK_THROWS(Network(nodes, {}, bad_length, {}));

  auto bad_frc = links;
  bad_frc[0].road_class.frc = 7;
  CHECK_THROWS(Network(nodes, {}, bad_frc, {}));

  auto bad_profile = links;
  bad_profile[0].profile = 0;
  CHECK_THROWS(Network(nodes, {}, bad_profile, {}));

  // Restriction whose from_link does not enter the via node.
  std::vector<Link> two{{"l0", 0, 1, 1000.0, 50.0, RoadClass{2}, -1},
                        {"l1", 1, 0, 1000.0, 50.0, RoadClass{2}, -1}};
  CHECK_THROWS(Network(nodes, {}, two, {{0, 0, 0}}));
  CHECK_NOTHROW(Network(nodes, {}, two, {{1, 0, 1}}));
}

TEST_CASE("network repair report counts changed breakpoints") {
  auto values = flat_profile(1.0);
  values[100] = 0.25;
  std::vector<Node> nodes{{"a", 0.0, 0.0}, {"b", 10000.0, 0.0}};
  std::vector<SpeedProfile> profiles{SpeedProfile("step", values)};
  std::vector<Link> links{{"long", 0, 1, 10000.0, 60.0, RoadClass{0}, 0},
                          {"plain", 1, 0, 10000.0, 60.0, RoadClass{0}, -1}};
  Network network(nodes, profiles, links, {});
  const FifoRepairReport report = network.repair_fifo();
  CHECK(report.links_total == 2);
  CHECK(report.profiled_links == 1);
  REQUIRE(report.repaired_links.size() == 1);
  CHECK(report.repaired_links[0].link_id == "long");
  CHECK(report.repaired_links[0].breakpoints_changed > 0);
  CHECK(report.repaired_links[0].max_arrival_shift_min > 0.0);
  CHECK(network.travel_time_fn(0).fifo_violations(1e-9).empty());
}
