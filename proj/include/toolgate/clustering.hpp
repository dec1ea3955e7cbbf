#pragma once

#include <cstddef>
#include <vector>

#include "toolgate/embedding.hpp"

namespace toolgate {

/// One agglomerative merge. `first` and `second` are the smallest original
/// point indexes of the two clusters joined, first < second.
struct MergeStep {
    std::size_t first = 0;
    std::size_t second = 0;
    double distance = 0.0;

    bool operator==(const MergeStep& other) const = default;
};

struct ClusterResult {
    /// One label per input point; labels are contiguous integers assigned in
    /// order of each cluster's first member index.
    std::vector<int> labels;
    std::vector<MergeStep> merges;

    int cluster_count() const;
};

/// Bottom-up average-linkage clustering over cosine distance (1 - cosine).
/// Repeatedly merges the closest pair while the minimum average distance is
/// <= distance_threshold; equal-distance candidates are broken by smallest
/// (min member index, then second index).
ClusterResult agglomerative_cluster(const std::vector<Embedding>& points,
                                    double distance_threshold);

}  // namespace toolgate
