#include "tsbm/intensity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsbm {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Array3<double> estimate_pi_a(const BlockStatsA& stats) {
    const int k_count = stats.n_clusters;
    const int u_count = stats.s.dim2();
    Array3<double> pi(k_count, k_count, u_count, kNaN);
    for (int k = 0; k < k_count; ++k) {
        for (int g = 0; g < k_count; ++g) {
            const int64_t pairs = stats.pair_count(k, g);
            if (pairs == 0) continue;
            const int64_t* s_row = stats.s.row(k, g);
            double* p_row = pi.row(k, g);
            for (int u = 0; u < u_count; ++u)
                p_row[u] = static_cast<double>(s_row[u]) / static_cast<double>(pairs);
        }
    }
    return pi;
}

Array3<double> estimate_pi_b(const BlockStatsB& stats) {
    const int k_count = stats.n_clusters;
    const int d_count = stats.n_time_clusters;
    Array3<double> pi(k_count, k_count, d_count, kNaN);
    for (int k = 0; k < k_count; ++k) {
        for (int g = 0; g < k_count; ++g) {
            const int64_t pairs = stats.pair_count(k, g);
            if (pairs == 0) continue;
            const int64_t* s_row = stats.s.row(k, g);
            double* p_row = pi.row(k, g);
            for (int d = 0; d < d_count; ++d)
                p_row[d] = static_cast<double>(s_row[d]) /
                           (static_cast<double>(pairs) * stats.time_cluster_sizes[d]);
        }
    }
    return pi;
}

namespace {

IntensityCurve accumulate(std::vector<double> increments, int k, int g) {
    IntensityCurve curve;
    curve.row_cluster = k;
    curve.col_cluster = g;
    curve.cumulative.resize(increments.size() + 1);
    curve.cumulative[0] = 0.0;
    for (size_t u = 0; u < increments.size(); ++u)
        curve.cumulative[u + 1] = curve.cumulative[u] + increments[u];
    curve.increments = std::move(increments);
    return curve;
}

}  // namespace

IntensityCurve block_curve_a(const Array3<double>& pi, int k, int g) {
    const double* p_row = pi.row(k, g);
    return accumulate(std::vector<double>(p_row, p_row + pi.dim2()), k, g);
}

IntensityCurve block_curve_b(const Array3<double>& pi, const Partition& time_clusters, int k,
                             int g) {
    const double* p_row = pi.row(k, g);
    std::vector<double> increments(time_clusters.size());
    for (int u = 0; u < time_clusters.size(); ++u) increments[u] = p_row[time_clusters.label(u)];
    return accumulate(std::move(increments), k, g);
}

double interpolate_cumulative(const IntensityCurve& curve, const TimeGrid& grid, double t) {
    if (static_cast<int>(curve.increments.size()) != grid.n_intervals())
        throw std::invalid_argument("curve and grid disagree on interval count");
    const int u = grid.interval_of(t);  // throws outside [0, T]
    const double left = grid.breakpoint(u);
    const double right = grid.breakpoint(u + 1);
    const double frac = (t - left) / (right - left);
    if (frac == 0.0) return curve.cumulative[u];
    if (frac == 1.0) return curve.cumulative[u + 1];
    return curve.cumulative[u] + frac * (curve.cumulative[u + 1] - curve.cumulative[u]);
}

}  // namespace tsbm
