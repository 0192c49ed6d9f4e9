#include "tsbm/block_stats.hpp"

#include <stdexcept>

namespace tsbm {

int64_t ordered_pair_count(int size_k, int size_g, bool same_cluster) {
    int64_t pairs = static_cast<int64_t>(size_k) * size_g;
    if (same_cluster) pairs -= size_k;
    return pairs;
}

namespace {

void check_node_partition(const InteractionTensor& tensor, const Partition& z) {
    if (z.size() != tensor.n_nodes())
        throw std::invalid_argument("node partition size does not match tensor");
}

}  // namespace

BlockStatsA block_stats_a(const InteractionTensor& tensor, const Partition& z) {
    check_node_partition(tensor, z);
    const int n = tensor.n_nodes();
    const int u_count = tensor.n_intervals();
    const int k_count = z.n_clusters();
    const std::vector<double> logfact = log_factorial_table(tensor.max_count());

    BlockStatsA stats;
    stats.n_clusters = k_count;
    stats.s = Array3<int64_t>(k_count, k_count, u_count, 0);
    stats.log_fact = Array3<double>(k_count, k_count, u_count, 0.0);
    stats.pair_count = Array2<int64_t>(k_count, k_count, 0);

    for (int k = 0; k < k_count; ++k)
        for (int g = 0; g < k_count; ++g)
            stats.pair_count(k, g) =
                ordered_pair_count(z.cluster_size(k), z.cluster_size(g), k == g);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int32_t* y = tensor.pair_row(i, j);
            int64_t* s_row = stats.s.row(z.label(i), z.label(j));
            double* f_row = stats.log_fact.row(z.label(i), z.label(j));
            for (int u = 0; u < u_count; ++u) {
                if (int32_t c = y[u]; c != 0) {
                    s_row[u] += c;
                    f_row[u] += logfact[c];
                }
            }
        }
    }
    return stats;
}

BlockStatsB block_stats_b(const InteractionTensor& tensor, const Partition& z,
                          const Partition& time_clusters) {
    check_node_partition(tensor, z);
    if (time_clusters.size() != tensor.n_intervals())
        throw std::invalid_argument("time partition size does not match tensor");

    BlockStatsA per_interval = block_stats_a(tensor, z);
    const int k_count = per_interval.n_clusters;
    const int d_count = time_clusters.n_clusters();

    BlockStatsB stats;
    stats.n_clusters = k_count;
    stats.n_time_clusters = d_count;
    stats.s = Array3<int64_t>(k_count, k_count, d_count, 0);
    stats.log_fact = Array3<double>(k_count, k_count, d_count, 0.0);
    stats.pair_count = per_interval.pair_count;
    stats.time_cluster_sizes = time_clusters.cluster_sizes();

    for (int k = 0; k < k_count; ++k) {
        for (int g = 0; g < k_count; ++g) {
            const int64_t* s_row = per_interval.s.row(k, g);
            const double* f_row = per_interval.log_fact.row(k, g);
            int64_t* s_out = stats.s.row(k, g);
            double* f_out = stats.log_fact.row(k, g);
            for (int u = 0; u < tensor.n_intervals(); ++u) {
                s_out[time_clusters.label(u)] += s_row[u];
                f_out[time_clusters.label(u)] += f_row[u];
            }
        }
    }
    return stats;
}

}  // namespace tsbm
