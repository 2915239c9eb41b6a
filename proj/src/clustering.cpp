#include "dynacc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace dynacc {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

Classification classify(std::span<const double> relative_series,
                        std::span<const ReferenceProfile> references) {
  if (references.empty()) {
    throw std::invalid_argument("classification needs at least one reference profile");
  }
  const ReferenceProfile* best = nullptr;
  double best_sq = 0.0;
  for (const ReferenceProfile& ref : references) {
    if (ref.values.size() != relative_series.size()) {
      throw std::invalid_argument("reference profile '" + ref.label +
                                  "' length does not match the series");
    }
    const double sq = squared_distance(relative_series, ref.values);
    if (best == nullptr || sq < best_sq || (sq == best_sq && ref.label < best->label)) {
      best = &ref;
      best_sq = sq;
    }
  }
  return {best->label, std::sqrt(best_sq)};
}

KMeansResult kmeans_longitudinal(std::span<const std::vector<double>> series, int k,
                                 std::uint64_t seed, int max_iterations) {
  if (series.empty()) {
    throw std::invalid_argument("k-means needs at least one series");
  }
  if (k < 1) {
    throw std::invalid_argument("k must be at least 1");
  }
  const std::size_t dims = series.front().size();
  for (const std::vector<double>& s : series) {
    if (s.size() != dims) {
      throw std::invalid_argument("k-means series have inconsistent lengths");
    }
  }
  std::set<std::vector<double>> distinct(series.begin(), series.end());
  if (static_cast<std::size_t>(k) > distinct.size()) {
    throw std::invalid_argument("k exceeds the number of distinct series");
  }

  std::mt19937_64 rng(seed);
  const std::size_t n = series.size();

  // k-means++ seeding: subsequent centers are drawn proportionally to the
  // squared distance to the nearest chosen center, so duplicates of an
  // already-chosen series can never be drawn again.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  {
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.push_back(series[first(rng)]);
    std::vector<double> dist_sq(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double best = squared_distance(series[i], centroids.front());
        for (std::size_t c = 1; c < centroids.size(); ++c) {
          best = std::min(best, squared_distance(series[i], centroids[c]));
        }
        dist_sq[i] = best;
        total += best;
      }
      std::uniform_real_distribution<double> pick(0.0, total);
      const double target = pick(rng);
      double running = 0.0;
      std::size_t chosen = n;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (dist_sq[i] > 0.0) {
          last_positive = i;
          if (chosen == n) {
            running += dist_sq[i];
            if (running > target) {
              chosen = i;
            }
          }
        }
      }
      // total > 0 is guaranteed while fewer than `distinct` centers are
      // chosen, so a positive-weight point always exists.
      centroids.push_back(series[chosen != n ? chosen : last_positive]);
    }
  }

  KMeansResult result;
  result.assignment.assign(n, 0);
  std::vector<std::uint32_t> previous(n, static_cast<std::uint32_t>(k));
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Assignment step.
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best_c = 0;
      double best_sq = squared_distance(series[i], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double sq = squared_distance(series[i], centroids[c]);
        if (sq < best_sq) {
          best_sq = sq;
          best_c = static_cast<std::uint32_t>(c);
        }
      }
      result.assignment[i] = best_c;
      distortion += best_sq;
    }
    result.distortion = distortion;
    result.distortion_history.push_back(distortion);
    result.iterations = iter + 1;
    if (result.assignment == previous) {
      break;
    }
    previous = result.assignment;

    // Update step; a cluster that lost all members keeps its centroid.
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      std::vector<double> mean(dims, 0.0);
      std::size_t members = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (result.assignment[i] == c) {
          for (std::size_t d = 0; d < dims; ++d) {
            mean[d] += series[i][d];
          }
          ++members;
        }
      }
      if (members > 0) {
        for (double& v : mean) {
          v /= static_cast<double>(members);
        }
        centroids[c] = std::move(mean);
      }
    }
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace dynacc
