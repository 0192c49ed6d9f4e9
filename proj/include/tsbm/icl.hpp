#pragma once

#include <cstdint>
#include <vector>

#include "tsbm/block_stats.hpp"
#include "tsbm/model.hpp"
#include "tsbm/partition.hpp"

namespace tsbm {

// Closed-form integrated classification likelihood of the count tensor under
// the Poisson block model, with block intensities integrated out against
// their Gamma(a, b) prior and cluster labels scored against a symmetric
// Dirichlet. All values are exact log probabilities, so ICL comparisons
// across cluster counts are meaningful without any penalty terms.

// Marginal likelihood of one pooled cell: S events with log-factorial sum F
// observed across `exposure` pair-interval slots of unit length.
double pooled_cell_log_marginal(int64_t s, double log_fact, int64_t exposure, double a,
                                double b);

// log p(labels | concentration): compact occupancy vector `sizes` over
// n_items items, Dirichlet weights integrated out.
double log_partition_prior(const std::vector<int>& sizes, int n_items, double concentration);

// Likelihood factors (no label priors).
double log_marginal_a(const BlockStatsA& stats, const Priors& priors);
double log_marginal_b(const BlockStatsB& stats, const Priors& priors);

// Full ICL: likelihood factor plus label prior(s).
double log_icl_a(const BlockStatsA& stats, const Partition& z, const Priors& priors);
double log_icl_b(const BlockStatsB& stats, const Partition& z, const Partition& time_clusters,
                 const Priors& priors);

// lgamma(n + shift) with a precomputed table for n in [0, table_size); larger
// arguments fall back to std::lgamma. Table lookups match direct std::lgamma
// calls bit for bit because the table is filled with std::lgamma.
class LgammaTable {
public:
    LgammaTable() : shift_(0.0) {}
    LgammaTable(double shift, int64_t table_size);

    double operator()(int64_t n) const {
        if (n < static_cast<int64_t>(table_.size())) return table_[n];
        return fallback(n);
    }

private:
    double fallback(int64_t n) const;

    double shift_;
    std::vector<double> table_;
};

}  // namespace tsbm
