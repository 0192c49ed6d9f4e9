#pragma once

#include <vector>

#include "tsbm/array.hpp"
#include "tsbm/block_stats.hpp"
#include "tsbm/partition.hpp"
#include "tsbm/time_grid.hpp"

namespace tsbm {

// Non-parametric estimates of the integrated block intensities. pi(k, g, u)
// estimates the integral of the intensity of block (k, g) over interval u:
// the block's event total divided by its pair count (for model B divided by
// pair count times time cluster size, shared across the cluster's intervals).
// Blocks without any observable pair (empty or singleton diagonal blocks)
// carry NaN, never zero: zero is a legitimate estimate, absence of pairs is
// not.
Array3<double> estimate_pi_a(const BlockStatsA& stats);            // K x K x U
Array3<double> estimate_pi_b(const BlockStatsB& stats);            // K x K x D

// Cumulative estimate of one block: running sums of the per-interval
// increments along the grid.
struct IntensityCurve {
    int row_cluster = 0;
    int col_cluster = 0;
    std::vector<double> increments;  // size U, integral over each interval
    std::vector<double> cumulative;  // size U + 1, cumulative[0] == 0
};

IntensityCurve block_curve_a(const Array3<double>& pi, int k, int g);
// Maps the per-time-cluster estimates back onto the observation intervals.
IntensityCurve block_curve_b(const Array3<double>& pi, const Partition& time_clusters, int k,
                             int g);

// Piecewise-linear interpolation of the cumulative curve. Exact at the grid
// breakpoints; throws std::invalid_argument outside [0, T].
double interpolate_cumulative(const IntensityCurve& curve, const TimeGrid& grid, double t);

}  // namespace tsbm
