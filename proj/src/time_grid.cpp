#include "tsbm/time_grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tsbm {

TimeGrid::TimeGrid(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
    if (breakpoints_.size() < 2)
        throw std::invalid_argument("time grid needs at least one interval");
    if (breakpoints_.front() != 0.0)
        throw std::invalid_argument("time grid must start at 0");
    for (size_t u = 1; u < breakpoints_.size(); ++u) {
        if (!(breakpoints_[u] > breakpoints_[u - 1]))
            throw std::invalid_argument("time grid breakpoints must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(int n_intervals, double horizon) {
    if (n_intervals < 1) throw std::invalid_argument("need at least one interval");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    std::vector<double> bp(n_intervals + 1);
    for (int u = 0; u <= n_intervals; ++u)
        bp[u] = horizon * static_cast<double>(u) / static_cast<double>(n_intervals);
    bp[0] = 0.0;
    bp[n_intervals] = horizon;
    return TimeGrid(std::move(bp));
}

int TimeGrid::interval_of(double t) const {
    if (!(t >= 0.0) || !(t <= horizon()))
        throw std::invalid_argument("time " + std::to_string(t) + " outside [0, " +
                                    std::to_string(horizon()) + "]");
    if (t >= breakpoints_[n_intervals() - 1]) return n_intervals() - 1;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return static_cast<int>(it - breakpoints_.begin()) - 1;
}

}  // namespace tsbm
