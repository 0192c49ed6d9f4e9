#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsbm/array.hpp"
#include "tsbm/icl.hpp"
#include "tsbm/model.hpp"
#include "tsbm/partition.hpp"
#include "tsbm/rng.hpp"
#include "tsbm/tensor.hpp"

namespace tsbm {

enum class Axis { Nodes, Intervals };

// Search plans. Nodes-only is the model A plan; the other three order the
// node and interval phases for model B.
enum class Strategy { NodesOnly, NodesThenIntervals, IntervalsThenNodes, Alternate };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct SearchConfig {
    Model model = Model::A;
    int k_max = 0;       // 0: ceil(n_nodes / 2)
    int d_max = 0;       // 0: ceil(sqrt(n_intervals)); model B only
    int n_restarts = 10;
    Strategy strategy = Strategy::NodesOnly;
    uint64_t seed = 1;
    double epsilon = 0.0;  // accept a move only if its gain exceeds this
    int n_threads = 1;     // restarts run concurrently on independent states
    // Model B: seed the time labels with agglomerative clustering of the
    // intervals instead of a uniform draw. A uniform draw can pool intervals
    // of opposing regimes into aggregates whose block means carry no node
    // structure at all, stranding the node phase at K = 1.
    bool ward_time_init = true;

    int resolved_k_max(int n_nodes) const;
    int resolved_d_max(int n_intervals) const;
    void validate(int n_nodes, int n_intervals) const;
};

// Mutable search position: the two labelings plus every statistic needed to
// price candidate moves in O(K * axis) and apply them incrementally. Cluster
// labels stay compact at all times; a cluster emptied by a move or merge is
// swapped with the last active one and retired, so the cluster count only
// ever decreases.
class SearchState {
public:
    SearchState(const InteractionTensor& tensor, const Priors& priors, Model model,
                int k_max, int d_max);

    void init_random(int k_init, int d_init, Rng& rng);
    // Random node labels over a caller-supplied interval labeling.
    void init_random_z(int k_init, const std::vector<int>& interval_labels, Rng& rng);
    // Labelings must be compact: every index in [0, max label] used.
    void init_from(const std::vector<int>& node_labels,
                   const std::vector<int>& interval_labels = {});

    double log_icl() const { return icl_; }
    int n_clusters() const { return k_; }
    int n_time_clusters() const { return d_; }
    Model model() const { return model_; }
    const std::vector<int>& node_labels() const { return z_; }
    const std::vector<int>& interval_labels() const { return y_; }
    Partition node_partition() const { return Partition(z_, k_); }
    Partition time_partition() const { return Partition(y_, d_); }

    // ICL change if the move were applied, with the cluster count held fixed.
    // The bonus for retiring a cluster emptied by an exchange is added by the
    // apply step. Zero-moves and identical merge arguments are rejected with
    // std::invalid_argument.
    double node_exchange_delta(int node, int target) const;
    double node_merge_delta(int src, int dst) const;
    double interval_exchange_delta(int interval, int target) const;
    double interval_merge_delta(int src, int dst) const;

    // `delta` must be the value returned by the matching evaluator.
    void apply_node_exchange(int node, int target, double delta);
    void apply_node_merge(int src, int dst, double delta);
    void apply_interval_exchange(int interval, int target, double delta);
    void apply_interval_merge(int src, int dst, double delta);

    // Full greedy passes over shuffled items until a pass accepts nothing;
    // every item is moved to its best strictly improving cluster (ties go to
    // the lowest cluster index). Returns the number of accepted moves.
    int exchange_to_quiescence(Axis axis, Rng& rng, double epsilon,
                               std::vector<double>* icl_trace = nullptr);
    // Repeatedly applies the best strictly improving merge. Returns the
    // number of merges.
    int merge_to_quiescence(Axis axis, double epsilon,
                            std::vector<double>* icl_trace = nullptr);

    // From-scratch ICL of the current labeling via the block statistics path.
    double recompute_log_icl() const;
    // Re-evaluates the cached ICL from the maintained tables (kills the tiny
    // float drift of long incremental runs; integer tables are exact anyway).
    void resync_cached_icl();
    // Rebuilds every table from the tensor and compares: integer statistics
    // must match exactly, float statistics and the cached ICL within tol.
    bool verify_integrity(double tol = 1e-8, std::string* mismatch = nullptr) const;

private:
    int axis_len() const { return model_ == Model::A ? u_ : d_; }
    int64_t pair_count(int k, int g) const;
    double cell_term(int64_t s, double f, int64_t exposure) const;
    // Likelihood of block (k, g) over the pooled time axis with the block's
    // per-slice counts shifted by sign * (shift_s, shift_f); null shift
    // pointers evaluate the block as is.
    double block_sum(const int64_t* s, const double* f, const int64_t* shift_s,
                     const double* shift_f, int sign, int64_t pairs) const;
    double node_prior_retire_gain() const;
    double time_prior_retire_gain() const;
    void rebuild_tables();
    double table_log_icl() const;
    void fold_node_aggregates(int node) const;
    void remove_empty_node_cluster(int slot);
    void remove_empty_time_cluster(int slot);

    const InteractionTensor* tensor_;
    Priors priors_;
    Model model_;
    int n_, u_, k_max_, d_max_;
    int k_ = 0, d_ = 0;
    std::vector<int> z_, y_;
    std::vector<int> csize_, tsize_;

    // Block statistics per observation interval (always maintained) and per
    // time cluster (model B).
    Array3<int64_t> s_u_, s_d_;
    Array3<double> f_u_, f_d_;
    // Per-node totals against every cluster: out_*(i, g, u) sums Y[i][j][u]
    // over j in cluster g, in_*(i, g, u) sums Y[j][i][u].
    Array3<int64_t> out_s_, in_s_;
    Array3<double> out_f_, in_f_;

    double icl_ = 0.0;
    double const_term_ = 0.0;  // a log b - lgamma(a)
    LgammaTable lgamma_a_;     // lgamma(n + a)
    std::vector<double> log_fact_;

    // Scratch for pricing many candidate targets of one node (model B folds
    // the per-interval aggregates onto time clusters once per node) and for
    // the four corner blocks of a move. A state is only ever used by one
    // thread, so mutable scratch is safe.
    mutable Array2<int64_t> agg_out_s_, agg_in_s_;
    mutable Array2<double> agg_out_f_, agg_in_f_;
    mutable int agg_node_ = -1;
    mutable std::vector<int64_t> corner_s_;
    mutable std::vector<double> corner_f_;
};

struct RestartReport {
    uint64_t seed = 0;
    double init_log_icl = 0.0;
    double final_log_icl = 0.0;
    int n_clusters = 0;
    int n_time_clusters = 0;
    int node_moves = 0;
    int node_merges = 0;
    int interval_moves = 0;
    int interval_merges = 0;
    std::vector<double> icl_trace;  // cached ICL after every accepted operation
    double recompute_gap = 0.0;     // |cached - from-scratch| at the end of the run
    bool integrity_ok = false;
    double wall_seconds = 0.0;
};

struct FitResult {
    Partition node_partition = Partition({0}, 1);
    std::optional<Partition> time_partition;
    double log_icl = 0.0;
    int best_restart = 0;
    std::vector<RestartReport> restarts;
};

// Agglomerative (Ward) clustering of the intervals on their per-pair,
// per-unit-time interaction rates, down to d_init clusters. Deterministic;
// ties break toward the lexicographically smallest cluster pair. d_init >= U
// gives every interval its own cluster. Labels are compact, numbered by
// first occurrence.
std::vector<int> ward_interval_init(const InteractionTensor& tensor, int d_init);

// Greedy ICL maximisation with random restarts. Deterministic for a fixed
// config (seed included), independent of n_threads.
FitResult run_greedy_icl(const InteractionTensor& tensor, const SearchConfig& config,
                         const Priors& priors = Priors{});

}  // namespace tsbm
