#pragma once

#include <cstdint>
#include <vector>

#include "tsbm/time_grid.hpp"

namespace tsbm {

struct Event {
    int source = 0;
    int target = 0;
    double time = 0.0;
};

// Aggregated interaction counts Y[i][j][u]: number of directed interactions
// from node i to node j during interval u. Self pairs (i, i) are structural
// zeros and may not be written. Storage is row-major with the interval index
// contiguous, which is the access order of every hot loop downstream.
class InteractionTensor {
public:
    InteractionTensor(int n_nodes, TimeGrid grid);

    int n_nodes() const { return n_nodes_; }
    int n_intervals() const { return grid_.n_intervals(); }
    const TimeGrid& grid() const { return grid_; }

    int32_t count(int i, int j, int u) const {
        return counts_[cell_index(i, j, u)];
    }
    // Contiguous per-pair slice Y[i][j][0..U).
    const int32_t* pair_row(int i, int j) const {
        return counts_.data() + cell_index(i, j, 0);
    }

    // Accumulates c interactions into cell (i, j, u). Throws on self pairs,
    // out-of-range indices or negative counts.
    void add(int i, int j, int u, int64_t c);

    int64_t total() const { return total_; }
    int32_t max_count() const { return max_count_; }

private:
    size_t cell_index(int i, int j, int u) const {
        return (static_cast<size_t>(i) * n_nodes_ + j) * grid_.n_intervals() + u;
    }

    int n_nodes_;
    TimeGrid grid_;
    std::vector<int32_t> counts_;
    int64_t total_ = 0;
    int32_t max_count_ = 0;
};

// Bins timestamped events onto the grid. Events at exactly t == T fall into
// the last interval. Throws DataError naming the offending record index when
// an event is invalid.
InteractionTensor build_tensor(const std::vector<Event>& events, const TimeGrid& grid,
                               int n_nodes);

// Table of log(n!) for n in [0, max_value]; shared by the likelihood code.
std::vector<double> log_factorial_table(int32_t max_value);

}  // namespace tsbm
