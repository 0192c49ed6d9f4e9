#include "tsbm/search.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tsbm {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::NodesOnly: return "nodes";
        case Strategy::NodesThenIntervals: return "tn";
        case Strategy::IntervalsThenNodes: return "nt";
        case Strategy::Alternate: return "alt";
    }
    return "nodes";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "nodes") return Strategy::NodesOnly;
    if (s == "tn") return Strategy::NodesThenIntervals;
    if (s == "nt") return Strategy::IntervalsThenNodes;
    if (s == "alt") return Strategy::Alternate;
    throw std::invalid_argument("unknown strategy '" + s + "', expected nodes, tn, nt or alt");
}

int SearchConfig::resolved_k_max(int n_nodes) const {
    return k_max > 0 ? k_max : (n_nodes + 1) / 2;
}

int SearchConfig::resolved_d_max(int n_intervals) const {
    if (model == Model::A) return 1;
    return d_max > 0 ? d_max
                     : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_intervals))));
}

void SearchConfig::validate(int n_nodes, int n_intervals) const {
    if (n_restarts < 1) throw std::invalid_argument("need at least one restart");
    if (epsilon < 0.0) throw std::invalid_argument("epsilon must be non-negative");
    if (n_threads < 1) throw std::invalid_argument("need at least one thread");
    const int kmax = resolved_k_max(n_nodes);
    if (kmax < 1 || kmax > n_nodes)
        throw std::invalid_argument("k_max outside [1, n_nodes]");
    if (model == Model::A) {
        if (d_max != 0)
            throw std::invalid_argument("model A has no time clusters, d_max not allowed");
        if (strategy != Strategy::NodesOnly)
            throw std::invalid_argument("model A uses the nodes-only strategy");
    } else {
        if (strategy == Strategy::NodesOnly)
            throw std::invalid_argument("model B needs a strategy that visits intervals");
        const int dmax = resolved_d_max(n_intervals);
        if (dmax < 1 || dmax > n_intervals)
            throw std::invalid_argument("d_max outside [1, n_intervals]");
    }
}

SearchState::SearchState(const InteractionTensor& tensor, const Priors& priors, Model model,
                         int k_max, int d_max)
    : tensor_(&tensor),
      priors_(priors),
      model_(model),
      n_(tensor.n_nodes()),
      u_(tensor.n_intervals()),
      k_max_(k_max),
      d_max_(model == Model::A ? 1 : d_max) {
    priors_.validate();
    if (k_max_ < 1 || k_max_ > n_)
        throw std::invalid_argument("k_max outside [1, n_nodes]");
    if (model_ == Model::B && (d_max_ < 1 || d_max_ > u_))
        throw std::invalid_argument("d_max outside [1, n_intervals]");

    s_u_ = Array3<int64_t>(k_max_, k_max_, u_, 0);
    f_u_ = Array3<double>(k_max_, k_max_, u_, 0.0);
    out_s_ = Array3<int64_t>(n_, k_max_, u_, 0);
    in_s_ = Array3<int64_t>(n_, k_max_, u_, 0);
    out_f_ = Array3<double>(n_, k_max_, u_, 0.0);
    in_f_ = Array3<double>(n_, k_max_, u_, 0.0);
    if (model_ == Model::B) {
        s_d_ = Array3<int64_t>(k_max_, k_max_, d_max_, 0);
        f_d_ = Array3<double>(k_max_, k_max_, d_max_, 0.0);
        agg_out_s_ = Array2<int64_t>(k_max_, d_max_, 0);
        agg_in_s_ = Array2<int64_t>(k_max_, d_max_, 0);
        agg_out_f_ = Array2<double>(k_max_, d_max_, 0.0);
        agg_in_f_ = Array2<double>(k_max_, d_max_, 0.0);
    }
    corner_s_.assign(static_cast<size_t>(std::max(u_, d_max_)), 0);
    corner_f_.assign(static_cast<size_t>(std::max(u_, d_max_)), 0.0);

    const_term_ = priors_.a * std::log(priors_.b) - std::lgamma(priors_.a);
    lgamma_a_ = LgammaTable(priors_.a, tensor.total() + 1);
    log_fact_ = log_factorial_table(tensor.max_count());
    csize_.assign(k_max_, 0);
    tsize_.assign(d_max_, 0);

    init_from(std::vector<int>(n_, 0), std::vector<int>(u_, 0));
}

namespace {

// Relabels by first appearance; returns the number of distinct labels.
int compact_labels(std::vector<int>& labels) {
    int upper = 0;
    for (int l : labels) upper = std::max(upper, l + 1);
    std::vector<int> remap(upper, -1);
    int next = 0;
    for (int& l : labels) {
        if (remap[l] < 0) remap[l] = next++;
        l = remap[l];
    }
    return next;
}

// Number of distinct labels in an already compact labeling. Labels must be
// taken verbatim here: verify_integrity rebuilds a state from the live
// labels and compares tables slot by slot, so init_from must not remap.
int count_compact_labels(const std::vector<int>& labels) {
    int upper = 0;
    for (int l : labels) upper = std::max(upper, l + 1);
    std::vector<bool> used(upper, false);
    for (int l : labels) used[l] = true;
    for (bool u : used)
        if (!u) throw std::invalid_argument("labeling skips a cluster index");
    return upper;
}

}  // namespace

void SearchState::init_random(int k_init, int d_init, Rng& rng) {
    if (k_init < 1 || k_init > k_max_)
        throw std::invalid_argument("initial cluster count outside [1, k_max]");
    std::vector<int> z(n_);
    for (int& l : z) l = rng.uniform_int(k_init);
    compact_labels(z);
    std::vector<int> y(u_, 0);
    if (model_ == Model::B) {
        if (d_init < 1 || d_init > d_max_)
            throw std::invalid_argument("initial time cluster count outside [1, d_max]");
        for (int& l : y) l = rng.uniform_int(d_init);
        compact_labels(y);
    }
    init_from(std::move(z), std::move(y));
}

void SearchState::init_random_z(int k_init, const std::vector<int>& interval_labels,
                                Rng& rng) {
    if (k_init < 1 || k_init > k_max_)
        throw std::invalid_argument("initial cluster count outside [1, k_max]");
    std::vector<int> z(n_);
    for (int& l : z) l = rng.uniform_int(k_init);
    compact_labels(z);
    init_from(z, interval_labels);
}

void SearchState::init_from(const std::vector<int>& node_labels,
                            const std::vector<int>& interval_labels) {
    if (static_cast<int>(node_labels.size()) != n_)
        throw std::invalid_argument("node labeling size does not match tensor");
    for (int l : node_labels)
        if (l < 0) throw std::invalid_argument("negative node label");
    z_ = node_labels;
    k_ = count_compact_labels(z_);
    if (k_ > k_max_) throw std::invalid_argument("labeling uses more clusters than k_max");

    if (model_ == Model::B) {
        if (static_cast<int>(interval_labels.size()) != u_)
            throw std::invalid_argument("interval labeling size does not match tensor");
        for (int l : interval_labels)
            if (l < 0) throw std::invalid_argument("negative interval label");
        y_ = interval_labels;
        d_ = count_compact_labels(y_);
        if (d_ > d_max_) throw std::invalid_argument("labeling uses more time clusters than d_max");
    } else {
        y_.assign(u_, 0);
        d_ = 1;
    }
    rebuild_tables();
}

void SearchState::rebuild_tables() {
    std::fill(csize_.begin(), csize_.end(), 0);
    for (int l : z_) ++csize_[l];
    std::fill(tsize_.begin(), tsize_.end(), 0);
    for (int l : y_) ++tsize_[l];

    s_u_.fill(0);
    f_u_.fill(0.0);
    out_s_.fill(0);
    in_s_.fill(0);
    out_f_.fill(0.0);
    in_f_.fill(0.0);

    const InteractionTensor& tensor = *tensor_;
    for (int i = 0; i < n_; ++i) {
        const int zi = z_[i];
        for (int j = 0; j < n_; ++j) {
            if (j == i) continue;
            const int zj = z_[j];
            const int32_t* y = tensor.pair_row(i, j);
            int64_t* block_s = s_u_.row(zi, zj);
            double* block_f = f_u_.row(zi, zj);
            int64_t* node_out_s = out_s_.row(i, zj);
            double* node_out_f = out_f_.row(i, zj);
            int64_t* node_in_s = in_s_.row(j, zi);
            double* node_in_f = in_f_.row(j, zi);
            for (int u = 0; u < u_; ++u) {
                if (const int32_t c = y[u]; c != 0) {
                    const double lf = log_fact_[c];
                    block_s[u] += c;
                    block_f[u] += lf;
                    node_out_s[u] += c;
                    node_out_f[u] += lf;
                    node_in_s[u] += c;
                    node_in_f[u] += lf;
                }
            }
        }
    }

    if (model_ == Model::B) {
        s_d_.fill(0);
        f_d_.fill(0.0);
        for (int k = 0; k < k_; ++k) {
            for (int g = 0; g < k_; ++g) {
                const int64_t* s_row = s_u_.row(k, g);
                const double* f_row = f_u_.row(k, g);
                int64_t* sd_row = s_d_.row(k, g);
                double* fd_row = f_d_.row(k, g);
                for (int u = 0; u < u_; ++u) {
                    sd_row[y_[u]] += s_row[u];
                    fd_row[y_[u]] += f_row[u];
                }
            }
        }
    }

    agg_node_ = -1;
    icl_ = table_log_icl();
}

int64_t SearchState::pair_count(int k, int g) const {
    return ordered_pair_count(csize_[k], csize_[g], k == g);
}

double SearchState::cell_term(int64_t s, double f, int64_t exposure) const {
    return const_term_ - f + lgamma_a_(s) -
           (static_cast<double>(s) + priors_.a) *
               std::log(static_cast<double>(exposure) + priors_.b);
}

double SearchState::block_sum(const int64_t* s, const double* f, const int64_t* shift_s,
                              const double* shift_f, int sign, int64_t pairs) const {
    if (model_ == Model::A) {
        // Uniform exposure across the axis: hoist the log out of the loop.
        const double log_base = std::log(static_cast<double>(pairs) + priors_.b);
        int64_t total_s = 0;
        double total_f = 0.0, total_lg = 0.0;
        if (shift_s != nullptr) {
            for (int t = 0; t < u_; ++t) {
                const int64_t sv = s[t] + sign * shift_s[t];
                total_s += sv;
                total_lg += lgamma_a_(sv);
                total_f += f[t] + sign * shift_f[t];
            }
        } else {
            for (int t = 0; t < u_; ++t) {
                total_s += s[t];
                total_lg += lgamma_a_(s[t]);
                total_f += f[t];
            }
        }
        return u_ * const_term_ - total_f + total_lg -
               (static_cast<double>(total_s) + priors_.a * u_) * log_base;
    }
    double total = 0.0;
    for (int t = 0; t < d_; ++t) {
        const int64_t sv = shift_s != nullptr ? s[t] + sign * shift_s[t] : s[t];
        const double fv = shift_f != nullptr ? f[t] + sign * shift_f[t] : f[t];
        total += cell_term(sv, fv, pairs * tsize_[t]);
    }
    return total;
}

void SearchState::fold_node_aggregates(int node) const {
    if (agg_node_ == node) return;
    for (int g = 0; g < k_; ++g) {
        int64_t* os = agg_out_s_.row(g);
        double* of = agg_out_f_.row(g);
        int64_t* is = agg_in_s_.row(g);
        double* inf = agg_in_f_.row(g);
        std::fill(os, os + d_, 0);
        std::fill(of, of + d_, 0.0);
        std::fill(is, is + d_, 0);
        std::fill(inf, inf + d_, 0.0);
        const int64_t* src_os = out_s_.row(node, g);
        const double* src_of = out_f_.row(node, g);
        const int64_t* src_is = in_s_.row(node, g);
        const double* src_if = in_f_.row(node, g);
        for (int u = 0; u < u_; ++u) {
            const int d = y_[u];
            os[d] += src_os[u];
            of[d] += src_of[u];
            is[d] += src_is[u];
            inf[d] += src_if[u];
        }
    }
    agg_node_ = node;
}

double SearchState::node_exchange_delta(int node, int target) const {
    if (node < 0 || node >= n_) throw std::invalid_argument("node index out of range");
    const int src = z_[node];
    if (target == src) throw std::invalid_argument("exchange target equals current cluster");
    if (target < 0 || target >= k_) throw std::invalid_argument("exchange target out of range");

    const double alpha = priors_.alpha;
    double delta = std::lgamma(csize_[src] - 1 + alpha) - std::lgamma(csize_[src] + alpha) +
                   std::lgamma(csize_[target] + 1 + alpha) - std::lgamma(csize_[target] + alpha);

    const bool on_intervals = model_ == Model::A;
    const Array3<int64_t>& S = on_intervals ? s_u_ : s_d_;
    const Array3<double>& F = on_intervals ? f_u_ : f_d_;
    if (!on_intervals) fold_node_aggregates(node);
    auto out_row_s = [&](int g) { return on_intervals ? out_s_.row(node, g) : agg_out_s_.row(g); };
    auto out_row_f = [&](int g) { return on_intervals ? out_f_.row(node, g) : agg_out_f_.row(g); };
    auto in_row_s = [&](int g) { return on_intervals ? in_s_.row(node, g) : agg_in_s_.row(g); };
    auto in_row_f = [&](int g) { return on_intervals ? in_f_.row(node, g) : agg_in_f_.row(g); };

    const int64_t ns = csize_[src], nd = csize_[target];

    for (int g = 0; g < k_; ++g) {
        if (g == src || g == target) continue;
        const int64_t ng = csize_[g];
        // Row blocks: the node's out-edges toward g leave (src, g) and join
        // (target, g). Column blocks move its in-edges the same way.
        delta += block_sum(S.row(src, g), F.row(src, g), out_row_s(g), out_row_f(g), -1,
                           (ns - 1) * ng) -
                 block_sum(S.row(src, g), F.row(src, g), nullptr, nullptr, 0, ns * ng);
        delta += block_sum(S.row(target, g), F.row(target, g), out_row_s(g), out_row_f(g), +1,
                           (nd + 1) * ng) -
                 block_sum(S.row(target, g), F.row(target, g), nullptr, nullptr, 0, nd * ng);
        delta += block_sum(S.row(g, src), F.row(g, src), in_row_s(g), in_row_f(g), -1,
                           ng * (ns - 1)) -
                 block_sum(S.row(g, src), F.row(g, src), nullptr, nullptr, 0, ng * ns);
        delta += block_sum(S.row(g, target), F.row(g, target), in_row_s(g), in_row_f(g), +1,
                           ng * (nd + 1)) -
                 block_sum(S.row(g, target), F.row(g, target), nullptr, nullptr, 0, ng * nd);
    }

    // The four blocks involving both clusters take combined shifts.
    const int len = axis_len();
    auto corner = [&](const int64_t* s, const double* f, const int64_t* s1, const double* f1,
                      int sign1, const int64_t* s2, const double* f2, int sign2,
                      int64_t pairs_old, int64_t pairs_new) {
        for (int t = 0; t < len; ++t) {
            corner_s_[t] = s[t] + sign1 * s1[t] + sign2 * s2[t];
            corner_f_[t] = f[t] + sign1 * f1[t] + sign2 * f2[t];
        }
        delta += block_sum(corner_s_.data(), corner_f_.data(), nullptr, nullptr, 0, pairs_new) -
                 block_sum(s, f, nullptr, nullptr, 0, pairs_old);
    };
    corner(S.row(src, src), F.row(src, src), out_row_s(src), out_row_f(src), -1, in_row_s(src),
           in_row_f(src), -1, ns * (ns - 1), (ns - 1) * (ns - 2));
    corner(S.row(target, target), F.row(target, target), out_row_s(target), out_row_f(target), +1,
           in_row_s(target), in_row_f(target), +1, nd * (nd - 1), (nd + 1) * nd);
    corner(S.row(src, target), F.row(src, target), out_row_s(target), out_row_f(target), -1,
           in_row_s(src), in_row_f(src), +1, ns * nd, (ns - 1) * (nd + 1));
    corner(S.row(target, src), F.row(target, src), out_row_s(src), out_row_f(src), +1,
           in_row_s(target), in_row_f(target), -1, nd * ns, (nd + 1) * (ns - 1));

    return delta;
}

double SearchState::node_merge_delta(int src, int dst) const {
    if (src == dst) throw std::invalid_argument("cannot merge a cluster with itself");
    if (src < 0 || src >= k_ || dst < 0 || dst >= k_)
        throw std::invalid_argument("merge cluster out of range");

    const double alpha = priors_.alpha;
    const int64_t ns = csize_[src], nd = csize_[dst];
    double delta = std::lgamma(alpha * (k_ - 1)) - std::lgamma(alpha * k_) + std::lgamma(alpha) +
                   std::lgamma(static_cast<double>(ns + nd) + alpha) -
                   std::lgamma(static_cast<double>(ns) + alpha) -
                   std::lgamma(static_cast<double>(nd) + alpha) +
                   std::lgamma(n_ + alpha * k_) - std::lgamma(n_ + alpha * (k_ - 1));

    const bool on_intervals = model_ == Model::A;
    const Array3<int64_t>& S = on_intervals ? s_u_ : s_d_;
    const Array3<double>& F = on_intervals ? f_u_ : f_d_;
    const int64_t m = ns + nd;

    for (int g = 0; g < k_; ++g) {
        if (g == src || g == dst) continue;
        const int64_t ng = csize_[g];
        delta += block_sum(S.row(dst, g), F.row(dst, g), S.row(src, g), F.row(src, g), +1,
                           m * ng) -
                 block_sum(S.row(src, g), F.row(src, g), nullptr, nullptr, 0, ns * ng) -
                 block_sum(S.row(dst, g), F.row(dst, g), nullptr, nullptr, 0, nd * ng);
        delta += block_sum(S.row(g, dst), F.row(g, dst), S.row(g, src), F.row(g, src), +1,
                           ng * m) -
                 block_sum(S.row(g, src), F.row(g, src), nullptr, nullptr, 0, ng * ns) -
                 block_sum(S.row(g, dst), F.row(g, dst), nullptr, nullptr, 0, ng * nd);
    }

    // The merged diagonal block absorbs all four blocks between src and dst.
    const int len = axis_len();
    for (int t = 0; t < len; ++t) {
        corner_s_[t] = S(src, src, t) + S(src, dst, t) + S(dst, src, t) + S(dst, dst, t);
        corner_f_[t] = F(src, src, t) + F(src, dst, t) + F(dst, src, t) + F(dst, dst, t);
    }
    delta += block_sum(corner_s_.data(), corner_f_.data(), nullptr, nullptr, 0, m * (m - 1)) -
             block_sum(S.row(src, src), F.row(src, src), nullptr, nullptr, 0, ns * (ns - 1)) -
             block_sum(S.row(src, dst), F.row(src, dst), nullptr, nullptr, 0, ns * nd) -
             block_sum(S.row(dst, src), F.row(dst, src), nullptr, nullptr, 0, nd * ns) -
             block_sum(S.row(dst, dst), F.row(dst, dst), nullptr, nullptr, 0, nd * (nd - 1));
    return delta;
}

double SearchState::interval_exchange_delta(int interval, int target) const {
    if (model_ == Model::A) throw std::invalid_argument("interval moves need model B");
    if (interval < 0 || interval >= u_) throw std::invalid_argument("interval index out of range");
    const int src = y_[interval];
    if (target == src) throw std::invalid_argument("exchange target equals current time cluster");
    if (target < 0 || target >= d_) throw std::invalid_argument("exchange target out of range");

    const double beta = priors_.beta;
    double delta = std::lgamma(tsize_[src] - 1 + beta) - std::lgamma(tsize_[src] + beta) +
                   std::lgamma(tsize_[target] + 1 + beta) - std::lgamma(tsize_[target] + beta);

    const int64_t w_src = tsize_[src], w_dst = tsize_[target];
    for (int k = 0; k < k_; ++k) {
        for (int g = 0; g < k_; ++g) {
            const int64_t pairs = pair_count(k, g);
            const int64_t sv = s_u_(k, g, interval);
            const double fv = f_u_(k, g, interval);
            const int64_t s_src = s_d_(k, g, src), s_dst = s_d_(k, g, target);
            const double f_src = f_d_(k, g, src), f_dst = f_d_(k, g, target);
            delta += cell_term(s_src - sv, f_src - fv, pairs * (w_src - 1)) +
                     cell_term(s_dst + sv, f_dst + fv, pairs * (w_dst + 1)) -
                     cell_term(s_src, f_src, pairs * w_src) -
                     cell_term(s_dst, f_dst, pairs * w_dst);
        }
    }
    return delta;
}

double SearchState::interval_merge_delta(int src, int dst) const {
    if (model_ == Model::A) throw std::invalid_argument("interval merges need model B");
    if (src == dst) throw std::invalid_argument("cannot merge a time cluster with itself");
    if (src < 0 || src >= d_ || dst < 0 || dst >= d_)
        throw std::invalid_argument("merge time cluster out of range");

    const double beta = priors_.beta;
    const int64_t ws = tsize_[src], wd = tsize_[dst];
    double delta = std::lgamma(beta * (d_ - 1)) - std::lgamma(beta * d_) + std::lgamma(beta) +
                   std::lgamma(static_cast<double>(ws + wd) + beta) -
                   std::lgamma(static_cast<double>(ws) + beta) -
                   std::lgamma(static_cast<double>(wd) + beta) +
                   std::lgamma(u_ + beta * d_) - std::lgamma(u_ + beta * (d_ - 1));

    for (int k = 0; k < k_; ++k) {
        for (int g = 0; g < k_; ++g) {
            const int64_t pairs = pair_count(k, g);
            const int64_t s_src = s_d_(k, g, src), s_dst = s_d_(k, g, dst);
            const double f_src = f_d_(k, g, src), f_dst = f_d_(k, g, dst);
            delta += cell_term(s_src + s_dst, f_src + f_dst, pairs * (ws + wd)) -
                     cell_term(s_src, f_src, pairs * ws) - cell_term(s_dst, f_dst, pairs * wd);
        }
    }
    return delta;
}

double SearchState::node_prior_retire_gain() const {
    const double alpha = priors_.alpha;
    return std::lgamma(alpha * (k_ - 1)) - std::lgamma(alpha * k_) +
           std::lgamma(n_ + alpha * k_) - std::lgamma(n_ + alpha * (k_ - 1));
}

double SearchState::time_prior_retire_gain() const {
    const double beta = priors_.beta;
    return std::lgamma(beta * (d_ - 1)) - std::lgamma(beta * d_) +
           std::lgamma(u_ + beta * d_) - std::lgamma(u_ + beta * (d_ - 1));
}

void SearchState::apply_node_exchange(int node, int target, double delta) {
    const int src = z_[node];
    assert(node >= 0 && node < n_ && target != src && target >= 0 && target < k_);

    for (int g = 0; g < k_; ++g) {
        const int64_t* move_out_s = out_s_.row(node, g);
        const double* move_out_f = out_f_.row(node, g);
        const int64_t* move_in_s = in_s_.row(node, g);
        const double* move_in_f = in_f_.row(node, g);
        int64_t* row_src_s = s_u_.row(src, g);
        int64_t* row_dst_s = s_u_.row(target, g);
        double* row_src_f = f_u_.row(src, g);
        double* row_dst_f = f_u_.row(target, g);
        int64_t* col_src_s = s_u_.row(g, src);
        int64_t* col_dst_s = s_u_.row(g, target);
        double* col_src_f = f_u_.row(g, src);
        double* col_dst_f = f_u_.row(g, target);
        for (int u = 0; u < u_; ++u) {
            row_src_s[u] -= move_out_s[u];
            row_dst_s[u] += move_out_s[u];
            row_src_f[u] -= move_out_f[u];
            row_dst_f[u] += move_out_f[u];
            col_src_s[u] -= move_in_s[u];
            col_dst_s[u] += move_in_s[u];
            col_src_f[u] -= move_in_f[u];
            col_dst_f[u] += move_in_f[u];
        }
        if (model_ == Model::B) {
            int64_t* drow_src_s = s_d_.row(src, g);
            int64_t* drow_dst_s = s_d_.row(target, g);
            double* drow_src_f = f_d_.row(src, g);
            double* drow_dst_f = f_d_.row(target, g);
            int64_t* dcol_src_s = s_d_.row(g, src);
            int64_t* dcol_dst_s = s_d_.row(g, target);
            double* dcol_src_f = f_d_.row(g, src);
            double* dcol_dst_f = f_d_.row(g, target);
            for (int u = 0; u < u_; ++u) {
                const int d = y_[u];
                drow_src_s[d] -= move_out_s[u];
                drow_dst_s[d] += move_out_s[u];
                drow_src_f[d] -= move_out_f[u];
                drow_dst_f[d] += move_out_f[u];
                dcol_src_s[d] -= move_in_s[u];
                dcol_dst_s[d] += move_in_s[u];
                dcol_src_f[d] -= move_in_f[u];
                dcol_dst_f[d] += move_in_f[u];
            }
        }
    }

    // Every other node sees its totals against src / target shift by its
    // interactions with the moved node.
    for (int j = 0; j < n_; ++j) {
        if (j == node) continue;
        const int32_t* to_node = tensor_->pair_row(j, node);
        const int32_t* from_node = tensor_->pair_row(node, j);
        int64_t* j_out_src = out_s_.row(j, src);
        int64_t* j_out_dst = out_s_.row(j, target);
        double* j_outf_src = out_f_.row(j, src);
        double* j_outf_dst = out_f_.row(j, target);
        int64_t* j_in_src = in_s_.row(j, src);
        int64_t* j_in_dst = in_s_.row(j, target);
        double* j_inf_src = in_f_.row(j, src);
        double* j_inf_dst = in_f_.row(j, target);
        for (int u = 0; u < u_; ++u) {
            if (const int32_t c = to_node[u]; c != 0) {
                const double lf = log_fact_[c];
                j_out_src[u] -= c;
                j_out_dst[u] += c;
                j_outf_src[u] -= lf;
                j_outf_dst[u] += lf;
            }
            if (const int32_t c = from_node[u]; c != 0) {
                const double lf = log_fact_[c];
                j_in_src[u] -= c;
                j_in_dst[u] += c;
                j_inf_src[u] -= lf;
                j_inf_dst[u] += lf;
            }
        }
    }

    csize_[src] -= 1;
    csize_[target] += 1;
    z_[node] = target;
    icl_ += delta;
    agg_node_ = -1;
    if (csize_[src] == 0) {
        icl_ += node_prior_retire_gain();
        remove_empty_node_cluster(src);
    }
}

void SearchState::apply_node_merge(int src, int dst, double delta) {
    assert(src != dst && src >= 0 && src < k_ && dst >= 0 && dst < k_);

    for (int m = 0; m < n_; ++m) {
        int64_t* os = out_s_.row(m, src);
        int64_t* od = out_s_.row(m, dst);
        double* ofs = out_f_.row(m, src);
        double* ofd = out_f_.row(m, dst);
        int64_t* is = in_s_.row(m, src);
        int64_t* id = in_s_.row(m, dst);
        double* ifs = in_f_.row(m, src);
        double* ifd = in_f_.row(m, dst);
        for (int u = 0; u < u_; ++u) {
            od[u] += os[u];
            os[u] = 0;
            ofd[u] += ofs[u];
            ofs[u] = 0.0;
            id[u] += is[u];
            is[u] = 0;
            ifd[u] += ifs[u];
            ifs[u] = 0.0;
        }
    }

    auto add_and_zero_s = [this](Array3<int64_t>& table, int from_k, int from_g, int to_k,
                                 int to_g, int len) {
        int64_t* from = table.row(from_k, from_g);
        int64_t* to = table.row(to_k, to_g);
        for (int t = 0; t < len; ++t) {
            to[t] += from[t];
            from[t] = 0;
        }
    };
    auto add_and_zero_f = [this](Array3<double>& table, int from_k, int from_g, int to_k,
                                 int to_g, int len) {
        double* from = table.row(from_k, from_g);
        double* to = table.row(to_k, to_g);
        for (int t = 0; t < len; ++t) {
            to[t] += from[t];
            from[t] = 0.0;
        }
    };
    auto merge_block = [&](int from_k, int from_g, int to_k, int to_g) {
        add_and_zero_s(s_u_, from_k, from_g, to_k, to_g, u_);
        add_and_zero_f(f_u_, from_k, from_g, to_k, to_g, u_);
        if (model_ == Model::B) {
            add_and_zero_s(s_d_, from_k, from_g, to_k, to_g, d_);
            add_and_zero_f(f_d_, from_k, from_g, to_k, to_g, d_);
        }
    };

    for (int g = 0; g < k_; ++g)
        if (g != src) merge_block(src, g, dst, g);
    for (int k = 0; k < k_; ++k)
        if (k != src) merge_block(k, src, k, dst);
    merge_block(src, src, dst, dst);

    csize_[dst] += csize_[src];
    csize_[src] = 0;
    for (int& l : z_)
        if (l == src) l = dst;
    icl_ += delta;
    agg_node_ = -1;
    // delta already covers the drop to k_ - 1 clusters, no retirement bonus
    remove_empty_node_cluster(src);
}

void SearchState::apply_interval_exchange(int interval, int target, double delta) {
    const int src = y_[interval];
    assert(model_ == Model::B && interval >= 0 && interval < u_ && target != src &&
           target >= 0 && target < d_);

    for (int k = 0; k < k_; ++k) {
        for (int g = 0; g < k_; ++g) {
            const int64_t sv = s_u_(k, g, interval);
            const double fv = f_u_(k, g, interval);
            int64_t* s_row = s_d_.row(k, g);
            double* f_row = f_d_.row(k, g);
            s_row[src] -= sv;
            s_row[target] += sv;
            f_row[src] -= fv;
            f_row[target] += fv;
        }
    }
    tsize_[src] -= 1;
    tsize_[target] += 1;
    y_[interval] = target;
    icl_ += delta;
    agg_node_ = -1;
    if (tsize_[src] == 0) {
        icl_ += time_prior_retire_gain();
        remove_empty_time_cluster(src);
    }
}

void SearchState::apply_interval_merge(int src, int dst, double delta) {
    assert(model_ == Model::B && src != dst && src >= 0 && src < d_ && dst >= 0 && dst < d_);
    for (int k = 0; k < k_; ++k) {
        for (int g = 0; g < k_; ++g) {
            int64_t* s_row = s_d_.row(k, g);
            double* f_row = f_d_.row(k, g);
            s_row[dst] += s_row[src];
            s_row[src] = 0;
            f_row[dst] += f_row[src];
            f_row[src] = 0.0;
        }
    }
    tsize_[dst] += tsize_[src];
    tsize_[src] = 0;
    for (int& l : y_)
        if (l == src) l = dst;
    icl_ += delta;
    agg_node_ = -1;
    remove_empty_time_cluster(src);
}

void SearchState::remove_empty_node_cluster(int slot) {
    assert(csize_[slot] == 0 && k_ >= 2);
    const int last = k_ - 1;
    if (slot != last) {
        for (int g = 0; g < k_; ++g) {
            std::swap_ranges(s_u_.row(slot, g), s_u_.row(slot, g) + u_, s_u_.row(last, g));
            std::swap_ranges(f_u_.row(slot, g), f_u_.row(slot, g) + u_, f_u_.row(last, g));
            if (model_ == Model::B) {
                std::swap_ranges(s_d_.row(slot, g), s_d_.row(slot, g) + d_, s_d_.row(last, g));
                std::swap_ranges(f_d_.row(slot, g), f_d_.row(slot, g) + d_, f_d_.row(last, g));
            }
        }
        for (int k = 0; k < k_; ++k) {
            std::swap_ranges(s_u_.row(k, slot), s_u_.row(k, slot) + u_, s_u_.row(k, last));
            std::swap_ranges(f_u_.row(k, slot), f_u_.row(k, slot) + u_, f_u_.row(k, last));
            if (model_ == Model::B) {
                std::swap_ranges(s_d_.row(k, slot), s_d_.row(k, slot) + d_, s_d_.row(k, last));
                std::swap_ranges(f_d_.row(k, slot), f_d_.row(k, slot) + d_, f_d_.row(k, last));
            }
        }
        for (int i = 0; i < n_; ++i) {
            std::swap_ranges(out_s_.row(i, slot), out_s_.row(i, slot) + u_, out_s_.row(i, last));
            std::swap_ranges(out_f_.row(i, slot), out_f_.row(i, slot) + u_, out_f_.row(i, last));
            std::swap_ranges(in_s_.row(i, slot), in_s_.row(i, slot) + u_, in_s_.row(i, last));
            std::swap_ranges(in_f_.row(i, slot), in_f_.row(i, slot) + u_, in_f_.row(i, last));
        }
        std::swap(csize_[slot], csize_[last]);
        for (int& l : z_)
            if (l == last) l = slot;
    }
    k_ -= 1;
    agg_node_ = -1;
}

void SearchState::remove_empty_time_cluster(int slot) {
    assert(model_ == Model::B && tsize_[slot] == 0 && d_ >= 2);
    const int last = d_ - 1;
    if (slot != last) {
        for (int k = 0; k < k_; ++k) {
            for (int g = 0; g < k_; ++g) {
                int64_t* s_row = s_d_.row(k, g);
                double* f_row = f_d_.row(k, g);
                std::swap(s_row[slot], s_row[last]);
                std::swap(f_row[slot], f_row[last]);
            }
        }
        std::swap(tsize_[slot], tsize_[last]);
        for (int& l : y_)
            if (l == last) l = slot;
    }
    d_ -= 1;
    agg_node_ = -1;
}

int SearchState::exchange_to_quiescence(Axis axis, Rng& rng, double epsilon,
                                        std::vector<double>* icl_trace) {
    if (axis == Axis::Intervals && model_ == Model::A)
        throw std::invalid_argument("interval moves need model B");
    const int n_items = axis == Axis::Nodes ? n_ : u_;
    std::vector<int> order(n_items);
    std::iota(order.begin(), order.end(), 0);
    int total = 0;
    for (;;) {
        rng.shuffle(order);
        int accepted = 0;
        for (int item : order) {
            const int active = axis == Axis::Nodes ? k_ : d_;
            if (active <= 1) return total + accepted;
            const int current = axis == Axis::Nodes ? z_[item] : y_[item];
            double best = epsilon;
            int best_target = -1;
            for (int t = 0; t < active; ++t) {
                if (t == current) continue;
                const double delta = axis == Axis::Nodes ? node_exchange_delta(item, t)
                                                         : interval_exchange_delta(item, t);
                if (delta > best) {
                    best = delta;
                    best_target = t;
                }
            }
            if (best_target >= 0) {
                if (axis == Axis::Nodes)
                    apply_node_exchange(item, best_target, best);
                else
                    apply_interval_exchange(item, best_target, best);
                ++accepted;
                if (icl_trace != nullptr) icl_trace->push_back(icl_);
            }
        }
        total += accepted;
        if (accepted == 0) return total;
    }
}

int SearchState::merge_to_quiescence(Axis axis, double epsilon,
                                     std::vector<double>* icl_trace) {
    if (axis == Axis::Intervals && model_ == Model::A)
        throw std::invalid_argument("interval merges need model B");
    int total = 0;
    for (;;) {
        const int active = axis == Axis::Nodes ? k_ : d_;
        if (active <= 1) return total;
        double best = epsilon;
        int best_src = -1, best_dst = -1;
        for (int dst = 0; dst < active; ++dst) {
            for (int src = dst + 1; src < active; ++src) {
                const double delta = axis == Axis::Nodes ? node_merge_delta(src, dst)
                                                         : interval_merge_delta(src, dst);
                if (delta > best) {
                    best = delta;
                    best_src = src;
                    best_dst = dst;
                }
            }
        }
        if (best_src < 0) return total;
        if (axis == Axis::Nodes)
            apply_node_merge(best_src, best_dst, best);
        else
            apply_interval_merge(best_src, best_dst, best);
        ++total;
        if (icl_trace != nullptr) icl_trace->push_back(icl_);
    }
}

double SearchState::table_log_icl() const {
    double total = 0.0;
    const bool on_intervals = model_ == Model::A;
    const Array3<int64_t>& S = on_intervals ? s_u_ : s_d_;
    const Array3<double>& F = on_intervals ? f_u_ : f_d_;
    for (int k = 0; k < k_; ++k)
        for (int g = 0; g < k_; ++g)
            total += block_sum(S.row(k, g), F.row(k, g), nullptr, nullptr, 0, pair_count(k, g));
    total += log_partition_prior(std::vector<int>(csize_.begin(), csize_.begin() + k_), n_,
                                 priors_.alpha);
    if (model_ == Model::B)
        total += log_partition_prior(std::vector<int>(tsize_.begin(), tsize_.begin() + d_), u_,
                                     priors_.beta);
    return total;
}

void SearchState::resync_cached_icl() { icl_ = table_log_icl(); }

double SearchState::recompute_log_icl() const {
    const Partition z = node_partition();
    if (model_ == Model::A) return log_icl_a(block_stats_a(*tensor_, z), z, priors_);
    const Partition y = time_partition();
    return log_icl_b(block_stats_b(*tensor_, z, y), z, y, priors_);
}

bool SearchState::verify_integrity(double tol, std::string* mismatch) const {
    auto fail = [&](const std::string& what) {
        if (mismatch != nullptr) *mismatch = what;
        return false;
    };

    SearchState fresh(*tensor_, priors_, model_, k_max_, d_max_);
    fresh.init_from(z_, y_);
    if (fresh.k_ != k_ || fresh.d_ != d_) return fail("cluster count mismatch under rebuild");
    for (int k = 0; k < k_; ++k)
        if (fresh.csize_[k] != csize_[k]) return fail("cluster size mismatch");
    for (int d = 0; d < d_; ++d)
        if (fresh.tsize_[d] != tsize_[d]) return fail("time cluster size mismatch");

    for (int k = 0; k < k_; ++k) {
        for (int g = 0; g < k_; ++g) {
            for (int u = 0; u < u_; ++u) {
                if (s_u_(k, g, u) != fresh.s_u_(k, g, u))
                    return fail("interval block count mismatch");
                if (std::abs(f_u_(k, g, u) - fresh.f_u_(k, g, u)) > tol)
                    return fail("interval block log-factorial mismatch");
            }
            if (model_ == Model::B) {
                for (int d = 0; d < d_; ++d) {
                    if (s_d_(k, g, d) != fresh.s_d_(k, g, d))
                        return fail("time block count mismatch");
                    if (std::abs(f_d_(k, g, d) - fresh.f_d_(k, g, d)) > tol)
                        return fail("time block log-factorial mismatch");
                }
            }
        }
    }
    for (int i = 0; i < n_; ++i) {
        for (int g = 0; g < k_; ++g) {
            for (int u = 0; u < u_; ++u) {
                if (out_s_(i, g, u) != fresh.out_s_(i, g, u) ||
                    in_s_(i, g, u) != fresh.in_s_(i, g, u))
                    return fail("node aggregate count mismatch");
                if (std::abs(out_f_(i, g, u) - fresh.out_f_(i, g, u)) > tol ||
                    std::abs(in_f_(i, g, u) - fresh.in_f_(i, g, u)) > tol)
                    return fail("node aggregate log-factorial mismatch");
            }
        }
    }
    if (std::abs(icl_ - fresh.icl_) > tol) return fail("cached ICL mismatch");
    return true;
}

std::vector<int> ward_interval_init(const InteractionTensor& tensor, int d_init) {
    if (d_init < 1) throw std::invalid_argument("d_init must be positive");
    const int u_len = tensor.n_intervals();
    std::vector<int> labels(u_len);
    if (d_init >= u_len) {
        for (int u = 0; u < u_len; ++u) labels[u] = u;
        return labels;
    }

    const int n = tensor.n_nodes();
    const size_t dims = static_cast<size_t>(n) * (n - 1);
    std::vector<double> x(static_cast<size_t>(u_len) * dims);
    for (int u = 0; u < u_len; ++u) {
        const double rate = 1.0 / tensor.grid().length(u);
        double* row = &x[static_cast<size_t>(u) * dims];
        size_t c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                row[c++] = static_cast<double>(tensor.count(i, j, u)) * rate;
            }
    }

    // Ward cost of fusing two clusters, kept current with Lance-Williams
    // updates; for singletons it is half the squared distance.
    std::vector<double> cost(static_cast<size_t>(u_len) * u_len, 0.0);
    for (int a = 0; a < u_len; ++a)
        for (int b = a + 1; b < u_len; ++b) {
            const double* xa = &x[static_cast<size_t>(a) * dims];
            const double* xb = &x[static_cast<size_t>(b) * dims];
            double sq = 0.0;
            for (size_t p = 0; p < dims; ++p) {
                const double d = xa[p] - xb[p];
                sq += d * d;
            }
            cost[static_cast<size_t>(a) * u_len + b] = 0.5 * sq;
            cost[static_cast<size_t>(b) * u_len + a] = 0.5 * sq;
        }

    std::vector<char> alive(u_len, 1);
    std::vector<int> csize(u_len, 1);
    std::vector<int> rep(u_len);
    for (int u = 0; u < u_len; ++u) rep[u] = u;

    for (int remaining = u_len; remaining > d_init; --remaining) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < u_len; ++a) {
            if (!alive[a]) continue;
            const double* row = &cost[static_cast<size_t>(a) * u_len];
            for (int b = a + 1; b < u_len; ++b)
                if (alive[b] && row[b] < best) {
                    best = row[b];
                    bi = a;
                    bj = b;
                }
        }
        const double dij = cost[static_cast<size_t>(bi) * u_len + bj];
        const double ni = csize[bi], nj = csize[bj];
        for (int k = 0; k < u_len; ++k) {
            if (!alive[k] || k == bi || k == bj) continue;
            const double nk = csize[k];
            const double merged =
                ((ni + nk) * cost[static_cast<size_t>(bi) * u_len + k] +
                 (nj + nk) * cost[static_cast<size_t>(bj) * u_len + k] - nk * dij) /
                (ni + nj + nk);
            cost[static_cast<size_t>(bi) * u_len + k] = merged;
            cost[static_cast<size_t>(k) * u_len + bi] = merged;
        }
        csize[bi] += csize[bj];
        alive[bj] = 0;
        for (int u = 0; u < u_len; ++u)
            if (rep[u] == bj) rep[u] = bi;
    }

    std::vector<int> remap(u_len, -1);
    int next = 0;
    for (int u = 0; u < u_len; ++u) {
        if (remap[rep[u]] < 0) remap[rep[u]] = next++;
        labels[u] = remap[rep[u]];
    }
    return labels;
}

namespace {

struct RestartOutcome {
    RestartReport report;
    std::vector<int> z;
    std::vector<int> y;
};

uint64_t derive_restart_seed(uint64_t seed, int restart) {
    return Rng::mix(Rng::mix(seed) ^ static_cast<uint64_t>(restart));
}

RestartOutcome run_one_restart(const InteractionTensor& tensor, const SearchConfig& config,
                               const Priors& priors, int restart,
                               const std::vector<int>* y_init) {
    const auto start = std::chrono::steady_clock::now();
    const int kmax = config.resolved_k_max(tensor.n_nodes());
    const int dmax = config.resolved_d_max(tensor.n_intervals());

    RestartOutcome out;
    out.report.seed = derive_restart_seed(config.seed, restart);
    Rng rng(out.report.seed);

    SearchState state(tensor, priors, config.model, kmax, dmax);
    if (y_init != nullptr)
        state.init_random_z(kmax, *y_init, rng);
    else
        state.init_random(kmax, dmax, rng);
    out.report.init_log_icl = state.log_icl();
    std::vector<double>* trace = &out.report.icl_trace;
    trace->push_back(state.log_icl());

    auto node_phase = [&]() {
        out.report.node_moves += state.exchange_to_quiescence(Axis::Nodes, rng, config.epsilon,
                                                              trace);
        state.resync_cached_icl();
    };
    auto node_merges = [&]() {
        out.report.node_merges += state.merge_to_quiescence(Axis::Nodes, config.epsilon, trace);
        state.resync_cached_icl();
    };
    auto interval_phase = [&]() {
        out.report.interval_moves +=
            state.exchange_to_quiescence(Axis::Intervals, rng, config.epsilon, trace);
        state.resync_cached_icl();
    };
    auto interval_merges = [&]() {
        out.report.interval_merges +=
            state.merge_to_quiescence(Axis::Intervals, config.epsilon, trace);
        state.resync_cached_icl();
    };

    switch (config.strategy) {
        case Strategy::NodesOnly:
            node_phase();
            node_merges();
            break;
        case Strategy::NodesThenIntervals:
            node_phase();
            node_merges();
            interval_phase();
            interval_merges();
            break;
        case Strategy::IntervalsThenNodes:
            interval_phase();
            interval_merges();
            node_phase();
            node_merges();
            break;
        case Strategy::Alternate: {
            for (;;) {
                const int before = out.report.node_moves + out.report.interval_moves;
                node_phase();
                interval_phase();
                if (out.report.node_moves + out.report.interval_moves == before) break;
            }
            node_merges();
            interval_merges();
            break;
        }
    }

    out.report.final_log_icl = state.log_icl();
    out.report.recompute_gap = std::abs(state.log_icl() - state.recompute_log_icl());
    out.report.integrity_ok = state.verify_integrity();
    out.report.n_clusters = state.n_clusters();
    out.report.n_time_clusters = config.model == Model::B ? state.n_time_clusters() : 0;
    out.z = state.node_labels();
    out.y = state.interval_labels();
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace

FitResult run_greedy_icl(const InteractionTensor& tensor, const SearchConfig& config,
                         const Priors& priors) {
    priors.validate();
    config.validate(tensor.n_nodes(), tensor.n_intervals());

    // The interval seeding is deterministic per tensor, so it is shared by
    // every restart; the restarts differ in their node draws.
    std::vector<int> ward_labels;
    const std::vector<int>* y_init = nullptr;
    if (config.model == Model::B && config.ward_time_init) {
        ward_labels = ward_interval_init(tensor, config.resolved_d_max(tensor.n_intervals()));
        y_init = &ward_labels;
    }

    std::vector<RestartOutcome> outcomes(config.n_restarts);
    const int n_workers = std::max(1, std::min(config.n_threads, config.n_restarts));
    if (n_workers == 1) {
        for (int r = 0; r < config.n_restarts; ++r)
            outcomes[r] = run_one_restart(tensor, config, priors, r, y_init);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) {
            workers.emplace_back([&]() {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= config.n_restarts) break;
                    outcomes[r] = run_one_restart(tensor, config, priors, r, y_init);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    int best = 0;
    for (int r = 1; r < config.n_restarts; ++r)
        if (outcomes[r].report.final_log_icl > outcomes[best].report.final_log_icl) best = r;

    FitResult result;
    result.best_restart = best;
    result.log_icl = outcomes[best].report.final_log_icl;
    result.node_partition = Partition(outcomes[best].z, outcomes[best].report.n_clusters);
    if (config.model == Model::B)
        result.time_partition =
            Partition(outcomes[best].y, outcomes[best].report.n_time_clusters);
    result.restarts.reserve(config.n_restarts);
    for (auto& o : outcomes) result.restarts.push_back(std::move(o.report));
    return result;
}

}  // namespace tsbm
