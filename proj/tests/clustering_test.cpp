#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dynacc/clustering.hpp"

using namespace dynacc;

namespace {

std::vector<double> wave(double base, double dip_at, double depth, int n = 96) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = base - depth * std::exp(-std::pow((i - dip_at) / 6.0, 2));
  }
  return v;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return std::sqrt(sum);
}

/// Exhaustive best 2-partition by total squared distance to part means.
double best_two_partition_distortion(const std::vector<std::vector<double>>& series) {
  const std::size_t n = series.size();
  const std::size_t dims = series.front().size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<double> mean_a(dims, 0.0), mean_b(dims, 0.0);
    std::size_t count_a = 0, count_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_a = (mask >> i) & 1u;
      auto& mean = in_a ? mean_a : mean_b;
      (in_a ? count_a : count_b) += 1;
      for (std::size_t d = 0; d < dims; ++d) {
        mean[d] += series[i][d];
      }
    }
    for (std::size_t d = 0; d < dims; ++d) {
      mean_a[d] /= count_a;
      mean_b[d] /= count_b;
    }
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& mean = ((mask >> i) & 1u) ? mean_a : mean_b;
      for (std::size_t d = 0; d < dims; ++d) {
        distortion += (series[i][d] - mean[d]) * (series[i][d] - mean[d]);
      }
    }
    best = std::min(best, distortion);
  }
  return best;
}

}  // namespace

TEST_CASE("a reference classifies to itself with distance zero") {
  std::vector<ReferenceProfile> refs{{"madrid", wave(1.0, 34.0, 0.1)},
                                     {"london", wave(1.0, 30.0, 0.35)}};
  const Classification c = classify(refs[1].values, refs);
  CHECK(c.label == "london");
  CHECK(c.distance == 0.0);
}

TEST_CASE("ties pick the lexicographically smallest label") {
  std::vector<ReferenceProfile> refs{{"B", {1.0, 0.0}}, {"A", {0.0, 1.0}}};
  const std::vector<double> midpoint{0.5, 0.5};
  CHECK(classify(midpoint, refs).label == "A");
  std::swap(refs[0], refs[1]);
  CHECK(classify(midpoint, refs).label == "A");
}

TEST_CASE("classification picks the closer reference, however slim the margin") {
  const std::vector<double> madrid_like = wave(1.0, 34.0, 0.12);
  const std::vector<double> london_like = wave(1.0, 32.0, 0.35);
  std::vector<ReferenceProfile> refs{{"london-like", london_like},
                                     {"madrid-like", madrid_like}};
  // A series nudged slightly toward the madrid shape.
  std::vector<double> sample = madrid_like;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    sample[i] = 0.55 * madrid_like[i] + 0.45 * london_like[i];
  }
  // Hand-checked distances: the sample must sit closer to madrid-like.
  REQUIRE(euclid(sample, madrid_like) < euclid(sample, london_like));
  const Classification c = classify(sample, refs);
  CHECK(c.label == "madrid-like");
  CHECK(c.distance == doctest::Approx(euclid(sample, madrid_like)).epsilon(1e-12));
}

TEST_CASE("classification order-invariance and zero-distance equivalence") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  std::vector<ReferenceProfile> refs;
  for (int r = 0; r < 6; ++r) {
    auto values = wave(1.0, 20.0 + 8.0 * r, 0.05 + 0.04 * r);
    refs.push_back({"ref" + std::to_string(r), values});
  }
  for (int round = 0; round < 20; ++round) {
    std::vector<double> sample = wave(1.0, 40.0, 0.2);
    for (double& v : sample) {
      v += noise(rng);
    }
    const Classification base = classify(sample, refs);
    auto shuffled = refs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Classification again = classify(sample, shuffled);
    CHECK(base.label == again.label);
    CHECK(base.distance == doctest::Approx(again.distance).epsilon(1e-12));
    CHECK((base.distance == 0.0) == (sample == refs[std::stoul(base.label.substr(3))].values));
  }
  CHECK_THROWS_AS(classify(wave(1.0, 40.0, 0.2), {}), std::invalid_argument);
}

TEST_CASE("k equal to the number of distinct series nails every point") {
  std::vector<std::vector<double>> series;
  for (int i = 0; i < 5; ++i) {
    series.push_back(wave(1.0, 10.0 + 15.0 * i, 0.05 + 0.05 * i));
  }
  series.push_back(series[2]);  // duplicate must not break seeding
  const KMeansResult result = kmeans_longitudinal(series, 5, 99);
  CHECK(result.distortion == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(result.assignment[2] == result.assignment[5]);
}

TEST_CASE("two well-separated bundles split perfectly and match brute force") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  std::vector<std::vector<double>> series;
  for (int i = 0; i < 4; ++i) {
    auto low = wave(0.7, 30.0, 0.1, 24);
    auto high = wave(1.3, 60.0, 0.1, 24);
    for (auto* bundle : {&low, &high}) {
      for (double& v : *bundle) {
        v += jitter(rng);
      }
    }
    series.push_back(low);
    series.push_back(high);
  }
  const KMeansResult result = kmeans_longitudinal(series, 2, 4);
  // Perfect split: even indices together, odd indices together.
  for (std::size_t i = 2; i < series.size(); i += 2) {
    CHECK(result.assignment[i] == result.assignment[0]);
    CHECK(result.assignment[i + 1] == result.assignment[1]);
  }
  CHECK(result.assignment[0] != result.assignment[1]);
  CHECK(result.distortion ==
        doctest::Approx(best_two_partition_distortion(series)).epsilon(1e-9));
}

TEST_CASE("k equal one returns the element-wise mean") {
  std::vector<std::vector<double>> series{{1.0, 2.0}, {3.0, 6.0}, {5.0, 1.0}};
  const KMeansResult result = kmeans_longitudinal(series, 1, 1);
  REQUIRE(result.centroids.size() == 1);
  CHECK(result.centroids[0][0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(result.centroids[0][1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("k larger than the distinct series count is an error") {
  std::vector<std::vector<double>> series{{1.0, 2.0}, {1.0, 2.0}, {3.0, 4.0}};
  CHECK_THROWS_AS(kmeans_longitudinal(series, 3, 1), std::invalid_argument);
  CHECK_NOTHROW(kmeans_longitudinal(series, 2, 1));
}

TEST_CASE("distortion never increases across lloyd iterations") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<std::vector<double>> series;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> s(16);
    for (double& v : s) {
      v = value(rng);
    }
    series.push_back(std::move(s));
  }
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const KMeansResult result = kmeans_longitudinal(series, 4, seed);
    for (std::size_t i = 1; i < result.distortion_history.size(); ++i) {
      CHECK(result.distortion_history[i] <= result.distortion_history[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("k-means is deterministic for a fixed seed") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::vector<std::vector<double>> series;
  for (int i = 0; i < 25; ++i) {
    std::vector<double> s(8);
    for (double& v : s) {
      v = value(rng);
    }
    series.push_back(std::move(s));
  }
  const KMeansResult a = kmeans_longitudinal(series, 3, 12345);
  const KMeansResult b = kmeans_longitudinal(series, 3, 12345);
  CHECK(a.assignment == b.assignment);
  CHECK(a.centroids == b.centroids);
  CHECK(a.distortion == b.distortion);
}
