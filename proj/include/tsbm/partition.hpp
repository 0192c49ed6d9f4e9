#pragma once

#include <vector>

namespace tsbm {

// Assignment of items (nodes or time intervals) to clusters. Labels are
// 0-based and bounded by n_clusters; empty clusters may exist transiently
// during construction but everything the toolkit exports is compact.
class Partition {
public:
    Partition(std::vector<int> labels, int n_clusters);

    // n_clusters inferred as max(label) + 1.
    static Partition from_labels(std::vector<int> labels);

    int size() const { return static_cast<int>(labels_.size()); }
    int n_clusters() const { return n_clusters_; }

    int label(int item) const { return labels_[item]; }
    const std::vector<int>& labels() const { return labels_; }

    int cluster_size(int k) const { return sizes_[k]; }
    const std::vector<int>& cluster_sizes() const { return sizes_; }

    bool is_compact() const;

    // Drops empty clusters, relabelling so surviving clusters keep their
    // relative order.
    Partition compacted() const;

private:
    std::vector<int> labels_;
    std::vector<int> sizes_;
    int n_clusters_;
};

}  // namespace tsbm
