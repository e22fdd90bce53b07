#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fdwm/heatmap.hpp"

namespace fdwm {

/// Feature of one canonical sensitive frequency: d0 = 1 - t(i,j),
/// d1 = Euclidean distance from (i,j) to the real-valued center (h/2, w/2).
struct FrequencyFeature {
    int i = 0, j = 0;
    double d0 = 0.0;
    double d1 = 0.0;
};

using Feature2 = std::array<double, 2>;

struct KMeansResult {
    std::array<std::vector<int>, 2> members;  // indices into the feature list
    std::array<Feature2, 2> centroids;        // final, in normalized space
    std::array<Feature2, 2> init_centroids;   // seeded k-means++ choice
    std::vector<double> wcss_history;         // objective after each iteration
    int iterations = 0;
    bool converged = false;
};

enum class Selection { Nearest, Farthest };

/// Binary map over frequency positions: 1 = use for trigger generation.
/// Point-symmetric by construction.
struct ClusteringMap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> mask;

    // diagnostics
    std::array<double, 2> mean_radius{0.0, 0.0};
    std::array<int, 2> member_count{0, 0};
    std::array<Feature2, 2> centroids{};
    int selected = 0;
    Selection selection = Selection::Nearest;

    std::uint8_t at(int i, int j) const { return mask[static_cast<std::size_t>(i) * width + j]; }
    std::size_t ones() const {
        std::size_t n = 0;
        for (auto v : mask) n += v;
        return n;
    }
    /// Canonical (pair-representative) positions carrying a 1.
    std::vector<std::pair<int, int>> canonical_ones() const;
};

/// One feature per canonical sensitive position (symmetric duplicates
/// excluded). Empty when the sensitivity map has no 1s.
std::vector<FrequencyFeature> extract_features(const FourierHeatMap& heatmap,
                                               const SensitivityMap& smap);

/// Per-dimension (v - min)/(max - min); a constant dimension maps to 0.
/// Requires at least two features.
std::vector<Feature2> minmax_normalize(const std::vector<FrequencyFeature>& features);

/// Lloyd iterations with seeded k-means++ init, k = 2. Deterministic for a
/// fixed seed; an emptied cluster is reseeded with the farthest point.
KMeansResult kmeans2(const std::vector<Feature2>& points, std::uint64_t seed,
                     int max_iters = 100, double tol = 1e-9);

/// Chooses the cluster with the lower mean raw d1 (Selection::Farthest picks
/// the other one) and marks each member and its symmetric partner.
ClusteringMap select_cluster(const KMeansResult& clusters,
                             const std::vector<FrequencyFeature>& features, int h, int w,
                             Selection selection = Selection::Nearest);

/// extract -> normalize -> kmeans2 -> select, the Algorithm-1 step 4 chain.
ClusteringMap cluster_map(const FourierHeatMap& heatmap, const SensitivityMap& smap,
                          std::uint64_t seed, Selection selection = Selection::Nearest);

/// Union of the map with its horizontal mirror. Trigger generation uses the
/// closed map by default so the embedded pattern is symmetric in the
/// frequency domain and survives horizontal flips.
ClusteringMap mirror_close(const ClusteringMap& map);

}  // namespace fdwm
