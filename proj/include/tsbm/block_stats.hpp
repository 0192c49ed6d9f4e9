#pragma once

#include <cstdint>
#include <vector>

#include "tsbm/array.hpp"
#include "tsbm/partition.hpp"
#include "tsbm/tensor.hpp"

namespace tsbm {

// Number of ordered node pairs (i, j), i != j, with i in cluster k and j in
// cluster g. Diagonal blocks lose their self pairs.
int64_t ordered_pair_count(int size_k, int size_g, bool same_cluster);

// Sufficient statistics of model A: for every block (k, g) and observation
// interval u, the event total S and the sum of log Y! over the block's pairs.
struct BlockStatsA {
    int n_clusters = 0;
    Array3<int64_t> s;          // K x K x U
    Array3<double> log_fact;    // K x K x U
    Array2<int64_t> pair_count; // K x K
};

BlockStatsA block_stats_a(const InteractionTensor& tensor, const Partition& z);

// Model B statistics: the interval axis is folded onto time clusters.
struct BlockStatsB {
    int n_clusters = 0;
    int n_time_clusters = 0;
    Array3<int64_t> s;          // K x K x D
    Array3<double> log_fact;    // K x K x D
    Array2<int64_t> pair_count; // K x K
    std::vector<int> time_cluster_sizes;  // |C_d|
};

BlockStatsB block_stats_b(const InteractionTensor& tensor, const Partition& z,
                          const Partition& time_clusters);

}  // namespace tsbm
