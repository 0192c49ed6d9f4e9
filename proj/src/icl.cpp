#include "tsbm/icl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsbm {

double pooled_cell_log_marginal(int64_t s, double log_fact, int64_t exposure, double a,
                                double b) {
    return a * std::log(b) - std::lgamma(a) - log_fact +
           std::lgamma(static_cast<double>(s) + a) -
           (static_cast<double>(s) + a) * std::log(static_cast<double>(exposure) + b);
}

double log_partition_prior(const std::vector<int>& sizes, int n_items, double concentration) {
    const int k = static_cast<int>(sizes.size());
    double value = std::lgamma(concentration * k) - k * std::lgamma(concentration) -
                   std::lgamma(n_items + concentration * k);
    for (int size : sizes) value += std::lgamma(size + concentration);
    return value;
}

double log_marginal_a(const BlockStatsA& stats, const Priors& priors) {
    double total = 0.0;
    const int k_count = stats.n_clusters;
    const int u_count = stats.s.dim2();
    for (int k = 0; k < k_count; ++k) {
        for (int g = 0; g < k_count; ++g) {
            const int64_t pairs = stats.pair_count(k, g);
            const int64_t* s_row = stats.s.row(k, g);
            const double* f_row = stats.log_fact.row(k, g);
            for (int u = 0; u < u_count; ++u)
                total += pooled_cell_log_marginal(s_row[u], f_row[u], pairs, priors.a, priors.b);
        }
    }
    return total;
}

double log_marginal_b(const BlockStatsB& stats, const Priors& priors) {
    double total = 0.0;
    const int k_count = stats.n_clusters;
    const int d_count = stats.n_time_clusters;
    for (int k = 0; k < k_count; ++k) {
        for (int g = 0; g < k_count; ++g) {
            const int64_t pairs = stats.pair_count(k, g);
            const int64_t* s_row = stats.s.row(k, g);
            const double* f_row = stats.log_fact.row(k, g);
            for (int d = 0; d < d_count; ++d)
                total += pooled_cell_log_marginal(
                    s_row[d], f_row[d], pairs * stats.time_cluster_sizes[d], priors.a, priors.b);
        }
    }
    return total;
}

double log_icl_a(const BlockStatsA& stats, const Partition& z, const Priors& priors) {
    priors.validate();
    if (!z.is_compact()) throw std::invalid_argument("node partition must be compact");
    if (z.n_clusters() != stats.n_clusters)
        throw std::invalid_argument("partition and statistics disagree on cluster count");
    return log_marginal_a(stats, priors) +
           log_partition_prior(z.cluster_sizes(), z.size(), priors.alpha);
}

double log_icl_b(const BlockStatsB& stats, const Partition& z, const Partition& time_clusters,
                 const Priors& priors) {
    priors.validate();
    if (!z.is_compact() || !time_clusters.is_compact())
        throw std::invalid_argument("partitions must be compact");
    if (z.n_clusters() != stats.n_clusters ||
        time_clusters.n_clusters() != stats.n_time_clusters)
        throw std::invalid_argument("partitions and statistics disagree on cluster counts");
    return log_marginal_b(stats, priors) +
           log_partition_prior(z.cluster_sizes(), z.size(), priors.alpha) +
           log_partition_prior(time_clusters.cluster_sizes(), time_clusters.size(),
                               priors.beta);
}

LgammaTable::LgammaTable(double shift, int64_t table_size) : shift_(shift) {
    const int64_t capped = std::min<int64_t>(table_size, int64_t{1} << 23);
    table_.resize(static_cast<size_t>(std::max<int64_t>(capped, 0)));
    for (int64_t n = 0; n < capped; ++n)
        table_[n] = std::lgamma(static_cast<double>(n) + shift_);
}

double LgammaTable::fallback(int64_t n) const {
    return std::lgamma(static_cast<double>(n) + shift_);
}

}  // namespace tsbm
