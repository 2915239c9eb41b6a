#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dynacc {

/// A labeled relative daily profile (96 values in (0, 1], maximum 1).
struct ReferenceProfile {
  std::string label;
  std::vector<double> values;
};

struct Classification {
  std::string label;
  double distance = 0.0;
};

/// Nearest reference by Euclidean distance over the full series; ties pick
/// the lexicographically smallest label.
Classification classify(std::span<const double> relative_series,
                        std::span<const ReferenceProfile> references);

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::uint32_t> assignment;     // per input series
  double distortion = 0.0;                   // sum of squared distances
  int iterations = 0;
  std::vector<double> distortion_history;    // one value per Lloyd iteration
};

/// Lloyd's algorithm on whole series (k-means++ seeding, seeded generator,
/// ties toward the lowest centroid index). Deterministic for a given seed.
KMeansResult kmeans_longitudinal(std::span<const std::vector<double>> series, int k,
                                 std::uint64_t seed, int max_iterations = 100);

}  // namespace dynacc
