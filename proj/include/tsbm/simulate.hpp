#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsbm/array.hpp"
#include "tsbm/rng.hpp"
#include "tsbm/tensor.hpp"
#include "tsbm/time_grid.hpp"

namespace tsbm {

// Generative description of a synthetic dynamic network: K node clusters,
// a set of connectivity regimes over the intervals, and one K x K intensity
// matrix per regime. Rates are per unit of time; the expected count of a
// pair in interval u is rate * interval length.
struct SimScenario {
    std::string name;
    int n_nodes = 0;
    TimeGrid grid = TimeGrid::uniform(1, 1.0);
    std::vector<double> node_weights;     // omega over K, sums to 1
    std::vector<double> regime_weights;   // rho; empty when the assignment is fixed
    std::vector<int> regime_of_interval;  // explicit assignment; empty when drawn from rho
    std::vector<Array2<double>> rates;    // one K x K matrix per regime
    double psi = 0.0;                     // planted contrast where the scenario has one
    uint64_t seed = 0;

    int n_node_clusters() const { return static_cast<int>(node_weights.size()); }
    int n_regimes() const { return static_cast<int>(rates.size()); }
    // Expected count of one pair of block (k, g) during interval u, given the
    // regime assignment y.
    double interval_mean(int k, int g, int u, const std::vector<int>& y) const {
        return rates[y[u]](k, g) * grid.length(u);
    }
    // True cumulative integrated intensity of block (k, g) at every grid
    // breakpoint (U + 1 values starting at 0) under assignment y.
    std::vector<double> true_cumulative(int k, int g, const std::vector<int>& y) const;

    void validate() const;
};

// Named scenarios used throughout the tests; psi (when non-zero) overrides
// the scenario's default contrast and must be >= 1.
//   scenario1:     50 nodes, 100 unit intervals, two alternating regimes
//   overfit:       the same process cut into 1000 intervals of length 0.1
//   scenario2:     50 nodes, 50 unit intervals, second half doubles all rates
//   scenario2-K3:  the scenario2 layout with three node clusters
SimScenario scenario_presets(const std::string& name, double psi = 0.0);
std::vector<std::string> scenario_preset_names();

// Cluster labels drawn independently from the weights.
std::vector<int> sample_memberships(const std::vector<double>& weights, int n_items, Rng& rng);

// Regime assignment of a scenario: the explicit one when fixed, otherwise
// drawn from the regime weights.
std::vector<int> sample_regimes(const SimScenario& scenario, Rng& rng);

// Count tensor with independent Poisson cell counts. Each (i, j, u) cell has
// its own RNG substream derived from one base value drawn from rng, so
// sample_events on an equally seeded generator produces exactly the same
// counts.
InteractionTensor sample_tensor(const SimScenario& scenario, const std::vector<int>& z,
                                const std::vector<int>& y, Rng& rng);

// Timestamped events of the same process: per-cell Poisson counts followed
// by uniformly placed timestamps inside the interval, sorted by time.
std::vector<Event> sample_events(const SimScenario& scenario, const std::vector<int>& z,
                                 const std::vector<int>& y, Rng& rng);

struct SimDraw {
    std::vector<int> z;
    std::vector<int> regimes;
    InteractionTensor tensor;
};

// Memberships, regimes and tensor in one call.
SimDraw sample_scenario(const SimScenario& scenario, Rng& rng);

}  // namespace tsbm
