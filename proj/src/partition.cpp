#include "tsbm/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tsbm {

Partition::Partition(std::vector<int> labels, int n_clusters)
    : labels_(std::move(labels)), n_clusters_(n_clusters) {
    if (labels_.empty()) throw std::invalid_argument("partition needs at least one item");
    if (n_clusters_ < 1) throw std::invalid_argument("partition needs at least one cluster");
    sizes_.assign(n_clusters_, 0);
    for (size_t i = 0; i < labels_.size(); ++i) {
        int l = labels_[i];
        if (l < 0 || l >= n_clusters_)
            throw std::invalid_argument("label " + std::to_string(l) + " of item " +
                                        std::to_string(i) + " outside [0, " +
                                        std::to_string(n_clusters_) + ")");
        ++sizes_[l];
    }
}

Partition Partition::from_labels(std::vector<int> labels) {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return Partition(std::move(labels), max_label + 1);
}

bool Partition::is_compact() const {
    return std::all_of(sizes_.begin(), sizes_.end(), [](int s) { return s > 0; });
}

Partition Partition::compacted() const {
    std::vector<int> remap(n_clusters_, -1);
    int next = 0;
    for (int k = 0; k < n_clusters_; ++k)
        if (sizes_[k] > 0) remap[k] = next++;
    std::vector<int> labels(labels_.size());
    for (size_t i = 0; i < labels_.size(); ++i) labels[i] = remap[labels_[i]];
    return Partition(std::move(labels), next);
}

}  // namespace tsbm
