#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dynacc/accessibility.hpp"

using namespace dynacc;

namespace {

/// exp(x) without <cmath>: argument halving plus a short Taylor series.
/// Independent route used to pin the decay spot checks.
double slow_exp(double x) {
  int halvings = 0;
  while (std::abs(x) > 1.0 / 64.0) {
    x /= 2.0;
    ++halvings;
  }
  double sum = 1.0, term = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= x / k;
    sum += term;
  }
  for (int i = 0; i < halvings; ++i) {
    sum *= sum;
  }
  return sum;
}

std::vector<double> default_instants() {
  std::vector<double> instants(96);
  for (int i = 0; i < 96; ++i) {
    instants[i] = 15.0 * i;
  }
  return instants;
}

Zone zone_with_population(double population) {
  Zone zone;
  zone.population = population;
  return zone;
}

}  // namespace

TEST_CASE("decay spot checks") {
  const DecayParams params{};
  CHECK(decay(0.0, params) == 1.0);
  // Frozen from an independent evaluation of exp(-0.975).
  CHECK(decay(15.0, params) == doctest::Approx(0.3771923535631569).epsilon(1e-13));
  CHECK(std::abs(decay(15.0, params) - slow_exp(-0.975)) < 1e-12);
  CHECK(decay(kUnreachable, params) == 0.0);
  CHECK_THROWS_AS(decay(-1.0, params), std::invalid_argument);
}

TEST_CASE("decay is strictly decreasing and multiplicative") {
  const DecayParams params{};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> cost(0.0, 200.0);
  for (int i = 0; i < 200; ++i) {
    const double a = cost(rng), b = cost(rng);
    CHECK(std::abs(decay(a + b, params) - decay(a, params) * decay(b, params)) < 1e-12);
    if (a < b) {
      CHECK(decay(a, params) > decay(b, params));
    }
  }
}

TEST_CASE("zone accessibility sums decayed opportunities") {
  const DecayParams params{};
  const std::vector<Zone> single{zone_with_population(100.0)};
  const std::vector<double> self_cost{0.0};
  CHECK(accessibility_over_row(self_cost, single, params) == 100.0);

  const std::vector<Zone> pair{zone_with_population(100.0), zone_with_population(200.0)};
  const std::vector<double> costs{0.0, 10.0};
  // 100 + 200 * exp(-0.65), frozen from an independent evaluation.
  CHECK(accessibility_over_row(costs, pair, params) ==
        doctest::Approx(204.40915535220320).epsilon(1e-13));
  CHECK(std::abs(accessibility_over_row(costs, pair, params) -
                 (100.0 + 200.0 * slow_exp(-0.65))) < 1e-9);

  const std::vector<double> unreachable{0.0, kUnreachable};
  CHECK(accessibility_over_row(unreachable, pair, params) == 100.0);
}

TEST_CASE("accessibility is bounded by total opportunities and monotone in cost") {
  const DecayParams params{};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> cost(0.0, 90.0);
  std::uniform_real_distribution<double> pop(0.0, 500.0);
  for (int round = 0; round < 100; ++round) {
    std::vector<Zone> zones;
    std::vector<double> costs;
    double total = 0.0;
    for (int j = 0; j < 12; ++j) {
      zones.push_back(zone_with_population(std::floor(pop(rng))));
      costs.push_back(cost(rng));
      total += zones.back().population;
    }
    const double base = accessibility_over_row(costs, zones, params);
    CHECK(base <= total + 1e-9);
    // Raising any single cost never raises the value.
    std::vector<double> raised = costs;
    raised[round % 12] += 5.0;
    CHECK(accessibility_over_row(raised, zones, params) <= base + 1e-12);
  }
}

TEST_CASE("zone accessibility reads straight out of a cost tensor") {
  const DecayParams params{};
  std::vector<Zone> zones{zone_with_population(100.0), zone_with_population(200.0)};
  CostTensor tensor({"a", "b"}, {480.0, 495.0});
  auto row = tensor.mutable_row(0, 0);
  row[0] = 0.0;
  row[1] = 10.0;
  auto later = tensor.mutable_row(0, 1);
  later[0] = 0.0;
  later[1] = kUnreachable;
  CHECK(zone_accessibility(0, 0, tensor, zones, params) ==
        doctest::Approx(204.40915535220320).epsilon(1e-13));
  CHECK(zone_accessibility(0, 1, tensor, zones, params) == 100.0);
  CHECK(tensor.index_of("b") == 1);
}

TEST_CASE("global profile is the population-weighted mean") {
  std::vector<Zone> zones{zone_with_population(1.0), zone_with_population(3.0)};
  std::vector<AccessibilitySeries> series(2);
  series[0].zone = 0;
  series[0].values = {10.0};
  series[1].zone = 1;
  series[1].values = {20.0};
  const GlobalProfile profile = global_profile(series, zones);
  REQUIRE(profile.values.size() == 1);
  CHECK(profile.values[0] == doctest::Approx(17.5).epsilon(1e-12));

  // Equal weights: plain mean.
  zones[1].population = 1.0;
  CHECK(global_profile(series, zones).values[0] == doctest::Approx(15.0).epsilon(1e-12));

  // Single zone: the global profile is that zone's series.
  const std::vector<AccessibilitySeries> one(series.begin(), series.begin() + 1);
  CHECK(global_profile(one, zones).values[0] == 10.0);

  // Convex combination stays within the zone range at every instant.
  CHECK(global_profile(series, zones).values[0] >= 10.0);
  CHECK(global_profile(series, zones).values[0] <= 20.0);

  zones[0].population = 0.0;
  zones[1].population = 0.0;
  CHECK_THROWS(global_profile(series, zones));
}

TEST_CASE("global metrics reproduce the published percentage arithmetic") {
  const auto instants = default_instants();
  const PeakWindows windows{};

  // One instant carries the maximum, the other 95 are tuned so the mean
  // lands exactly on the published average.
  const double london_max = 1673785.74, london_mean = 1438593.62;
  GlobalProfile london;
  london.values.assign(96, (96.0 * london_mean - london_max) / 95.0);
  london.values[32] = london_max;
  const GlobalMetrics lm = global_metrics(london, instants, windows);
  CHECK(lm.max == doctest::Approx(london_max).epsilon(1e-12));
  CHECK(lm.mean == doctest::Approx(london_mean).epsilon(1e-9));
  CHECK(std::abs(lm.pct_mean_of_max - 85.95) <= 0.01);

  // 47 low values, 48 at the published median, one at the maximum: the two
  // middle entries both sit on the median.
  const double madrid_median = 1838078.41, madrid_max = 1968829.47;
  GlobalProfile madrid;
  madrid.values.assign(47, madrid_median * 0.8);
  madrid.values.insert(madrid.values.end(), 48, madrid_median);
  madrid.values.push_back(madrid_max);
  REQUIRE(madrid.values.size() == 96);
  const GlobalMetrics mm = global_metrics(madrid, instants, windows);
  CHECK(mm.median == doctest::Approx(madrid_median).epsilon(1e-12));
  CHECK(std::abs(mm.pct_median_of_max - 93.36) <= 0.01);

  // A constant profile scores 100% on both columns.
  GlobalProfile flat;
  flat.values.assign(96, 5.0);
  const GlobalMetrics fm = global_metrics(flat, instants, windows);
  CHECK(fm.pct_mean_of_max == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(fm.pct_median_of_max == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("peak detection finds window minima, ties resolve early") {
  const auto instants = default_instants();
  const PeakWindows windows{};
  std::vector<double> relative(96, 1.0);
  relative[32] = 0.7;   // 08:00
  relative[68] = 0.65;  // 17:00
  auto [morning, afternoon] = detect_peaks(relative, instants, windows);
  CHECK(morning == 480.0);
  CHECK(afternoon == 1020.0);

  // Tie between 17:00 and 17:15 goes to 17:00.
  relative[69] = 0.65;
  CHECK(detect_peaks(relative, instants, windows).second == 1020.0);

  // Two-dip series shaped like the published profiles.
  std::vector<double> dips(96);
  for (int i = 0; i < 96; ++i) {
    const double t = instants[i];
    dips[i] = 1.0 - 0.3 * std::exp(-std::pow((t - 480.0) / 60.0, 2)) -
              0.35 * std::exp(-std::pow((t - 1020.0) / 80.0, 2));
  }
  const auto paper_like = detect_peaks(dips, instants, windows);
  CHECK(paper_like.first == 480.0);
  CHECK(paper_like.second == 1020.0);
}

TEST_CASE("peak gap formula") {
  CHECK(peak_gap(0.8, 0.7) == doctest::Approx(0.3333).epsilon(1e-3));
  CHECK(std::abs(peak_gap(0.8, 0.7) - 1.0 / 3.0) < 1e-12);
  CHECK(peak_gap(0.9, 0.9) == 0.0);
  CHECK(peak_gap(1.0, 1.0) == 0.0);
  CHECK(peak_gap(1.0, 0.5) == 1.0);
  CHECK(peak_gap(0.7, 0.8) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // order-free
}

TEST_CASE("zone metrics cover the flat and congested cases") {
  const auto instants = default_instants();
  const PeakWindows windows{};

  AccessibilitySeries flat;
  flat.zone = 0;
  flat.values.assign(96, 1234.5);
  const ZoneMetrics fm = zone_metrics("flat", flat, instants, windows, 1234.5);
  CHECK(fm.morning_ratio == 1.0);
  CHECK(fm.afternoon_ratio == 1.0);
  CHECK(fm.gap == 0.0);

  AccessibilitySeries dipped;
  dipped.zone = 0;
  dipped.values.assign(96, 1000.0);
  dipped.values[32] = 650.0;  // worst at 08:00
  dipped.values[69] = 800.0;
  const ZoneMetrics dm = zone_metrics("dipped", dipped, instants, windows, 1000.0);
  CHECK(dm.worst_minute == 480.0);
  CHECK(dm.worst_is_morning);
  CHECK(dm.morning_peak_minute == 480.0);
  CHECK(dm.afternoon_peak_minute == 1035.0);
  CHECK(dm.morning_ratio == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(dm.afternoon_ratio == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(dm.gap == doctest::Approx((0.8 - 0.65) / (1.0 - 0.65)).epsilon(1e-12));

  AccessibilitySeries afternoon_worst = dipped;
  afternoon_worst.values[69] = 600.0;
  const ZoneMetrics am = zone_metrics("pm", afternoon_worst, instants, windows, 1000.0);
  CHECK(am.worst_minute == 1035.0);
  CHECK(!am.worst_is_morning);
}

TEST_CASE("relative series peak at one, zero series fall back to flat") {
  AccessibilitySeries series;
  series.values = {2.0, 4.0, 3.0};
  const auto relative = series.relative();
  CHECK(relative[0] == 0.5);
  CHECK(relative[1] == 1.0);
  CHECK(relative[2] == 0.75);

  AccessibilitySeries zeros;
  zeros.values = {0.0, 0.0};
  const auto flat = zeros.relative();
  CHECK(flat[0] == 1.0);
  CHECK(flat[1] == 1.0);
}

TEST_CASE("cumulative population curve sums rings from downtown") {
  // Zones at 1, 3 and 5 km from downtown; 2 km rings.
  std::vector<Zone> zones(4);
  zones[0].centroid_x = 1000.0;
  zones[0].population = 100.0;
  zones[1].centroid_x = 3000.0;
  zones[1].population = 50.0;
  zones[2].centroid_x = -3000.0;
  zones[2].population = 30.0;
  zones[3].centroid_x = 5000.0;
  zones[3].population = 0.0;  // populated-cell area excludes this one
  const auto curve = cumulative_population_curve(zones, 0.0, 0.0, 2.0);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].distance_km == 2.0);
  CHECK(curve[0].cumulative_population == 100.0);
  CHECK(curve[0].net_density_per_km2 == doctest::Approx(100.0 / 4.0));
  CHECK(curve[1].cumulative_population == 180.0);
  CHECK(curve[1].net_density_per_km2 == doctest::Approx(80.0 / 8.0));
  CHECK(curve[2].cumulative_population == 180.0);
  CHECK(curve[2].net_density_per_km2 == 0.0);

  // Single zone at downtown: the curve starts with its population.
  const std::vector<Zone> just_downtown(zones.begin(), zones.begin() + 1);
  const auto tiny = cumulative_population_curve(just_downtown, 1000.0, 0.0, 2.0);
  REQUIRE(!tiny.empty());
  CHECK(tiny[0].cumulative_population == 100.0);
}
