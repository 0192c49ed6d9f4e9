#pragma once

#include <vector>

namespace tsbm {

// Partition of the observation window [0, T] into U contiguous intervals.
// Interval u (0-based) spans [breakpoint(u), breakpoint(u+1)); the final
// interval additionally absorbs t == T.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> breakpoints);

    static TimeGrid uniform(int n_intervals, double horizon);

    int n_intervals() const { return static_cast<int>(breakpoints_.size()) - 1; }
    double horizon() const { return breakpoints_.back(); }

    double breakpoint(int u) const { return breakpoints_[u]; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    double length(int u) const { return breakpoints_[u + 1] - breakpoints_[u]; }

    // 0-based interval containing t. Throws std::invalid_argument outside [0, T].
    int interval_of(double t) const;

private:
    std::vector<double> breakpoints_;
};

}  // namespace tsbm
