#include "tsbm/evaluate.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "tsbm/icl.hpp"

namespace tsbm {

namespace {

// Maps arbitrary label values onto 0..k-1 in order of first appearance.
std::vector<int> densify(const std::vector<int>& labels, int& n_clusters) {
    std::unordered_map<int, int> remap;
    std::vector<int> dense(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        auto it = remap.try_emplace(labels[i], static_cast<int>(remap.size())).first;
        dense[i] = it->second;
    }
    n_clusters = static_cast<int>(remap.size());
    return dense;
}

double comb2(int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace

double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw std::invalid_argument("label vectors differ in length");
    if (labels_a.empty()) throw std::invalid_argument("label vectors are empty");

    int ka = 0, kb = 0;
    const std::vector<int> a = densify(labels_a, ka);
    const std::vector<int> b = densify(labels_b, kb);
    const int64_t n = static_cast<int64_t>(a.size());

    Array2<int64_t> contingency(ka, kb, 0);
    std::vector<int64_t> row_sums(ka, 0), col_sums(kb, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        ++contingency(a[i], b[i]);
        ++row_sums[a[i]];
        ++col_sums[b[i]];
    }

    double sum_cells = 0.0;
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) sum_cells += comb2(contingency(i, j));
    double sum_rows = 0.0;
    for (int64_t r : row_sums) sum_rows += comb2(r);
    double sum_cols = 0.0;
    for (int64_t c : col_sums) sum_cols += comb2(c);

    const double expected = sum_rows * sum_cols / comb2(n);
    const double maximum = 0.5 * (sum_rows + sum_cols);
    if (maximum == expected) return 1.0;
    return (sum_cells - expected) / (maximum - expected);
}

void for_each_partition(int n_items, int max_clusters,
                        const std::function<void(const std::vector<int>&, int)>& fn) {
    if (n_items < 1) throw std::invalid_argument("need at least one item");
    if (max_clusters < 1) throw std::invalid_argument("need at least one cluster");
    std::vector<int> labels(n_items, 0);
    // Restricted growth strings: labels[i] <= 1 + max(labels[0..i)).
    auto recurse = [&](auto&& self, int pos, int used) -> void {
        if (pos == n_items) {
            fn(labels, used);
            return;
        }
        const int limit = std::min(used + 1, max_clusters);
        for (int l = 0; l < limit; ++l) {
            labels[pos] = l;
            self(self, pos + 1, std::max(used, l + 1));
        }
    };
    recurse(recurse, 1, 1);
}

ExhaustiveResult exhaustive_icl_optimum(const InteractionTensor& tensor, const Priors& priors,
                                        Model model, int k_max, int d_max) {
    priors.validate();
    if (tensor.n_nodes() > 8)
        throw std::invalid_argument("exhaustive search is limited to 8 nodes");
    if (model == Model::B && tensor.n_intervals() > 5)
        throw std::invalid_argument("exhaustive search is limited to 5 intervals for model B");
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    if (model == Model::A && d_max != 0)
        throw std::invalid_argument("model A takes no time cluster bound");
    if (model == Model::B && d_max < 1)
        throw std::invalid_argument("model B needs a time cluster bound");

    ExhaustiveResult best;
    bool have_best = false;

    for_each_partition(tensor.n_nodes(), k_max, [&](const std::vector<int>& z_labels, int k) {
        Partition z(z_labels, k);
        if (model == Model::A) {
            const double icl = log_icl_a(block_stats_a(tensor, z), z, priors);
            ++best.n_candidates;
            if (!have_best || icl > best.log_icl) {
                have_best = true;
                best.log_icl = icl;
                best.z = z;
            }
            return;
        }
        for_each_partition(tensor.n_intervals(), d_max,
                           [&](const std::vector<int>& y_labels, int d) {
                               Partition y(y_labels, d);
                               const double icl =
                                   log_icl_b(block_stats_b(tensor, z, y), z, y, priors);
                               ++best.n_candidates;
                               if (!have_best || icl > best.log_icl) {
                                   have_best = true;
                                   best.log_icl = icl;
                                   best.z = z;
                                   best.time_clusters = y;
                               }
                           });
    });
    return best;
}

}  // namespace tsbm
