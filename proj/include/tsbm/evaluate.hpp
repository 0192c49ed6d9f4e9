#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tsbm/model.hpp"
#include "tsbm/partition.hpp"
#include "tsbm/tensor.hpp"

namespace tsbm {

// Adjusted Rand index between two labelings of the same items. Label values
// are arbitrary; only the induced partitions matter. Identical partitions
// score exactly 1, and the degenerate case where the correction leaves a zero
// denominator (both partitions trivial) scores 1 as well.
double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct ExhaustiveResult {
    double log_icl = 0.0;
    Partition z = Partition({0}, 1);
    std::optional<Partition> time_clusters;
    int64_t n_candidates = 0;  // (pairs of) partitions scored
};

// Scores every node partition with at most k_max clusters (and for model B
// every time partition with at most d_max clusters) and returns the exact ICL
// optimum. Guard rails: n_nodes <= 8, and for model B n_intervals <= 5.
ExhaustiveResult exhaustive_icl_optimum(const InteractionTensor& tensor, const Priors& priors,
                                        Model model, int k_max, int d_max = 0);

// Calls fn(labels, n_clusters) for every partition of n items into at most
// max_clusters non-empty clusters, in restricted-growth order.
void for_each_partition(int n_items, int max_clusters,
                        const std::function<void(const std::vector<int>&, int)>& fn);

}  // namespace tsbm
