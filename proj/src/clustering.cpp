#include "fdwm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fdwm/rng.hpp"
#include "fdwm/spectral.hpp"

namespace fdwm {

namespace {

double sqdist(const Feature2& a, const Feature2& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

}  // namespace

std::vector<std::pair<int, int>> ClusteringMap::canonical_ones() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j)
            if (at(i, j) && canonical_index(i, j, height, width) == std::pair<int, int>{i, j})
                out.emplace_back(i, j);
    return out;
}

std::vector<FrequencyFeature> extract_features(const FourierHeatMap& heatmap,
                                               const SensitivityMap& smap) {
    if (heatmap.height != smap.height || heatmap.width != smap.width)
        throw std::invalid_argument("extract_features: heat map and sensitivity map dims differ");
    const int h = heatmap.height, w = heatmap.width;
    std::vector<FrequencyFeature> out;
    for (const auto& [i, j] : canonical_positions(h, w)) {
        if (!smap.at(i, j)) continue;
        FrequencyFeature f;
        f.i = i;
        f.j = j;
        f.d0 = 1.0 - heatmap.at(i, j);
        const double di = i - h / 2.0, dj = j - w / 2.0;
        f.d1 = std::sqrt(di * di + dj * dj);
        out.push_back(f);
    }
    return out;
}

std::vector<Feature2> minmax_normalize(const std::vector<FrequencyFeature>& features) {
    if (features.size() < 2)
        throw std::invalid_argument("minmax_normalize: need at least 2 features");
    double lo[2] = {features[0].d0, features[0].d1};
    double hi[2] = {features[0].d0, features[0].d1};
    for (const auto& f : features) {
        lo[0] = std::min(lo[0], f.d0);
        hi[0] = std::max(hi[0], f.d0);
        lo[1] = std::min(lo[1], f.d1);
        hi[1] = std::max(hi[1], f.d1);
    }
    std::vector<Feature2> out(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) {
        const double raw[2] = {features[k].d0, features[k].d1};
        for (int dim = 0; dim < 2; ++dim)
            out[k][dim] = hi[dim] > lo[dim] ? (raw[dim] - lo[dim]) / (hi[dim] - lo[dim]) : 0.0;
    }
    return out;
}

KMeansResult kmeans2(const std::vector<Feature2>& points, std::uint64_t seed, int max_iters,
                     double tol) {
    const std::size_t n = points.size();
    if (n < 2) throw std::invalid_argument("kmeans2: need at least 2 points");
    bool any_distinct = false;
    for (const auto& p : points) any_distinct |= (sqdist(p, points[0]) > 0.0);
    if (!any_distinct) throw std::invalid_argument("kmeans2: all points identical");

    KMeansResult res;
    Rng rng(mix64(seed, 0x63A11ull));

    // k-means++ for k = 2: uniform first centroid, second weighted by the
    // squared distance to the first.
    const std::size_t c0 = rng.index(n);
    std::vector<double> d2(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        d2[k] = sqdist(points[k], points[c0]);
        total += d2[k];
    }
    std::size_t c1 = c0;
    double target = rng.uniform() * total;
    for (std::size_t k = 0; k < n; ++k) {
        target -= d2[k];
        if (d2[k] > 0.0 && target <= 0.0) {
            c1 = k;
            break;
        }
    }
    if (c1 == c0) {  // numerical tail: take the farthest point
        c1 = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (d2[k] > d2[c1]) c1 = k;
    }
    std::array<Feature2, 2> cent = {points[c0], points[c1]};
    res.init_centroids = cent;

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        // assignment step; tie goes to the lower cluster index
        for (std::size_t k = 0; k < n; ++k)
            assign[k] = sqdist(points[k], cent[1]) < sqdist(points[k], cent[0]) ? 1 : 0;

        // update step
        std::array<Feature2, 2> next = {Feature2{0.0, 0.0}, Feature2{0.0, 0.0}};
        std::array<std::size_t, 2> count = {0, 0};
        for (std::size_t k = 0; k < n; ++k) {
            next[assign[k]][0] += points[k][0];
            next[assign[k]][1] += points[k][1];
            ++count[assign[k]];
        }
        for (int c = 0; c < 2; ++c) {
            if (count[c] == 0) {
                // reseed the emptied cluster with the point farthest from
                // its current centroid
                std::size_t far = 0;
                double best = -1.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double dd = sqdist(points[k], cent[assign[k]]);
                    if (dd > best) {
                        best = dd;
                        far = k;
                    }
                }
                next[c] = points[far];
                assign[far] = c;
                count[c] = 1;
                next[1 - c] = {0.0, 0.0};
                count[1 - c] = 0;
                for (std::size_t k = 0; k < n; ++k)
                    if (assign[k] == 1 - c) {
                        next[1 - c][0] += points[k][0];
                        next[1 - c][1] += points[k][1];
                        ++count[1 - c];
                    }
            }
        }
        for (int c = 0; c < 2; ++c) {
            next[c][0] /= static_cast<double>(count[c]);
            next[c][1] /= static_cast<double>(count[c]);
        }

        double wcss = 0.0;
        for (std::size_t k = 0; k < n; ++k) wcss += sqdist(points[k], next[assign[k]]);
        res.wcss_history.push_back(wcss);

        const double movement =
            std::sqrt(std::max(sqdist(cent[0], next[0]), sqdist(cent[1], next[1])));
        cent = next;
        res.iterations = iter + 1;
        if (movement < tol) {
            res.converged = true;
            break;
        }
    }
    // final assignment against the converged centroids
    for (std::size_t k = 0; k < n; ++k)
        assign[k] = sqdist(points[k], cent[1]) < sqdist(points[k], cent[0]) ? 1 : 0;
    res.centroids = cent;
    for (std::size_t k = 0; k < n; ++k) res.members[assign[k]].push_back(static_cast<int>(k));
    return res;
}

ClusteringMap select_cluster(const KMeansResult& clusters,
                             const std::vector<FrequencyFeature>& features, int h, int w,
                             Selection selection) {
    ClusteringMap map;
    map.height = h;
    map.width = w;
    map.mask.assign(static_cast<std::size_t>(h) * w, 0);
    map.selection = selection;
    map.centroids = clusters.centroids;

    double min_d1 = std::numeric_limits<double>::infinity();
    int min_cluster = 0;
    for (int c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (int k : clusters.members[c]) {
            sum += features[static_cast<std::size_t>(k)].d1;
            if (features[static_cast<std::size_t>(k)].d1 < min_d1) {
                min_d1 = features[static_cast<std::size_t>(k)].d1;
                min_cluster = c;
            }
        }
        map.member_count[c] = static_cast<int>(clusters.members[c].size());
        map.mean_radius[c] =
            clusters.members[c].empty() ? 0.0 : sum / static_cast<double>(clusters.members[c].size());
    }

    int nearest;
    if (map.mean_radius[0] == map.mean_radius[1])
        nearest = min_cluster;  // tie: the cluster holding the closest-to-center point
    else
        nearest = map.mean_radius[0] < map.mean_radius[1] ? 0 : 1;
    map.selected = selection == Selection::Nearest ? nearest : 1 - nearest;

    for (int k : clusters.members[map.selected]) {
        const auto& f = features[static_cast<std::size_t>(k)];
        map.mask[static_cast<std::size_t>(f.i) * w + f.j] = 1;
        const auto [si, sj] = sym_index(f.i, f.j, h, w);
        map.mask[static_cast<std::size_t>(si) * w + sj] = 1;
    }
    return map;
}

ClusteringMap cluster_map(const FourierHeatMap& heatmap, const SensitivityMap& smap,
                          std::uint64_t seed, Selection selection) {
    const auto features = extract_features(heatmap, smap);
    if (features.empty())
        throw std::invalid_argument("cluster_map: no sensitive frequencies");
    const auto normalized = minmax_normalize(features);
    const auto clusters = kmeans2(normalized, seed);
    return select_cluster(clusters, features, heatmap.height, heatmap.width, selection);
}

ClusteringMap mirror_close(const ClusteringMap& map) {
    ClusteringMap out = map;
    for (int i = 0; i < map.height; ++i)
        for (int j = 0; j < map.width; ++j)
            if (map.at(i, j)) {
                const auto [mi, mj] = mirror_index(i, j, map.height, map.width);
                out.mask[static_cast<std::size_t>(mi) * map.width + mj] = 1;
                // keep the closed map point-symmetric as well
                const auto [si, sj] = sym_index(mi, mj, map.height, map.width);
                out.mask[static_cast<std::size_t>(si) * map.width + sj] = 1;
            }
    return out;
}

}  // namespace fdwm
