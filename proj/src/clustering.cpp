#include "toolgate/clustering.hpp"

#include <algorithm>
#include <limits>

namespace toolgate {

int ClusterResult::cluster_count() const {
    int max_label = -1;
    for (int label : labels) max_label = std::max(max_label, label);
    return max_label + 1;
}

namespace {

struct Cluster {
    std::size_t min_index;  // smallest original point index; stable identity
    std::size_t size;
    bool active;
};

}  // namespace

ClusterResult agglomerative_cluster(const std::vector<Embedding>& points,
                                    double distance_threshold) {
    if (points.empty()) {
        throw Error(ErrorCode::EmptyInput, "no points to cluster");
    }
    if (distance_threshold < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "distance_threshold must be >= 0");
    }
    const std::size_t n = points.size();
    for (const auto& p : points) {
        if (p.dim() != points[0].dim()) {
            throw Error(ErrorCode::DimensionMismatch, "points of mixed dimension");
        }
    }

    // Full pairwise cosine-distance matrix; updated in place by the
    // Lance-Williams average-linkage rule on each merge.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 1.0 - cosine_similarity(points[i], points[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    std::vector<Cluster> clusters(n);
    std::vector<std::size_t> membership(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[i] = {i, 1, true};
        membership[i] = i;
    }

    ClusterResult result;
    double last_merge_distance = -std::numeric_limits<double>::infinity();

    while (true) {
        // Closest active pair; ties resolved by (min member index, second index).
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = n, best_j = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!clusters[i].active) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!clusters[j].active) continue;
                double d = dist[i * n + j];
                std::size_t a = std::min(clusters[i].min_index, clusters[j].min_index);
                std::size_t b = std::max(clusters[i].min_index, clusters[j].min_index);
                if (d < best ||
                    (d == best && (best_i == n ||
                                   std::pair(a, b) <
                                       std::pair(std::min(clusters[best_i].min_index,
                                                          clusters[best_j].min_index),
                                                 std::max(clusters[best_i].min_index,
                                                          clusters[best_j].min_index))))) {
                    best = d;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i == n || best > distance_threshold) break;

        // Average linkage is monotone; a decreasing merge distance means the
        // update rule is broken.
        if (best < last_merge_distance - 1e-9) {
            throw Error(ErrorCode::InvalidArgument,
                        "merge distance decreased; linkage update is inconsistent");
        }
        last_merge_distance = best;

        std::size_t keep = best_i, drop = best_j;
        if (clusters[drop].min_index < clusters[keep].min_index) std::swap(keep, drop);

        result.merges.push_back({std::min(clusters[keep].min_index, clusters[drop].min_index),
                                 std::max(clusters[keep].min_index, clusters[drop].min_index),
                                 best});

        double keep_size = static_cast<double>(clusters[keep].size);
        double drop_size = static_cast<double>(clusters[drop].size);
        for (std::size_t k = 0; k < n; ++k) {
            if (!clusters[k].active || k == keep || k == drop) continue;
            double merged = (keep_size * dist[keep * n + k] + drop_size * dist[drop * n + k]) /
                            (keep_size + drop_size);
            dist[keep * n + k] = merged;
            dist[k * n + keep] = merged;
        }
        clusters[keep].size += clusters[drop].size;
        clusters[drop].active = false;
        for (std::size_t p = 0; p < n; ++p) {
            if (membership[p] == drop) membership[p] = keep;
        }
    }

    // Contiguous labels in order of first member index.
    std::vector<int> slot_label(n, -1);
    int next_label = 0;
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t slot = membership[p];
        if (slot_label[slot] < 0) slot_label[slot] = next_label++;
    }
    result.labels.resize(n);
    for (std::size_t p = 0; p < n; ++p) result.labels[p] = slot_label[membership[p]];
    return result;
}

}  // namespace toolgate
