#include "tsbm/tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tsbm/errors.hpp"

namespace tsbm {

InteractionTensor::InteractionTensor(int n_nodes, TimeGrid grid)
    : n_nodes_(n_nodes), grid_(std::move(grid)) {
    if (n_nodes < 2) throw std::invalid_argument("need at least two nodes");
    counts_.assign(static_cast<size_t>(n_nodes) * n_nodes * grid_.n_intervals(), 0);
}

void InteractionTensor::add(int i, int j, int u, int64_t c) {
    if (i < 0 || i >= n_nodes_ || j < 0 || j >= n_nodes_)
        throw DataError("node index out of range: (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
    if (i == j)
        throw DataError("self interaction on node " + std::to_string(i) + " not allowed");
    if (u < 0 || u >= grid_.n_intervals())
        throw DataError("interval index out of range: " + std::to_string(u));
    if (c < 0) throw DataError("negative interaction count: " + std::to_string(c));

    int64_t updated = static_cast<int64_t>(counts_[cell_index(i, j, u)]) + c;
    if (updated > std::numeric_limits<int32_t>::max())
        throw DataError("interaction count overflow in cell (" + std::to_string(i) + ", " +
                        std::to_string(j) + ", " + std::to_string(u) + ")");
    counts_[cell_index(i, j, u)] = static_cast<int32_t>(updated);
    total_ += c;
    if (updated > max_count_) max_count_ = static_cast<int32_t>(updated);
}

InteractionTensor build_tensor(const std::vector<Event>& events, const TimeGrid& grid,
                               int n_nodes) {
    InteractionTensor tensor(n_nodes, grid);
    for (size_t r = 0; r < events.size(); ++r) {
        const Event& e = events[r];
        try {
            if (!(e.time >= 0.0) || !(e.time <= grid.horizon()))
                throw DataError("event time " + std::to_string(e.time) + " outside [0, " +
                                std::to_string(grid.horizon()) + "]");
            tensor.add(e.source, e.target, grid.interval_of(e.time), 1);
        } catch (const DataError& err) {
            throw DataError("event record " + std::to_string(r) + ": " + err.what());
        }
    }
    return tensor;
}

std::vector<double> log_factorial_table(int32_t max_value) {
    std::vector<double> table(static_cast<size_t>(max_value) + 1, 0.0);
    for (int32_t n = 2; n <= max_value; ++n)
        table[n] = table[n - 1] + std::log(static_cast<double>(n));
    return table;
}

}  // namespace tsbm
