#include "tsbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace tsbm {

std::vector<double> SimScenario::true_cumulative(int k, int g,
                                                 const std::vector<int>& y) const {
    std::vector<double> cumulative(grid.n_intervals() + 1, 0.0);
    for (int u = 0; u < grid.n_intervals(); ++u)
        cumulative[u + 1] = cumulative[u] + interval_mean(k, g, u, y);
    return cumulative;
}

void SimScenario::validate() const {
    if (n_nodes < 2) throw std::invalid_argument("scenario needs at least two nodes");
    const int k = n_node_clusters();
    if (k < 1) throw std::invalid_argument("scenario needs node weights");
    double total = 0.0;
    for (double w : node_weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("node weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("node weights must sum to 1");

    if (rates.empty()) throw std::invalid_argument("scenario needs at least one rate matrix");
    for (const auto& m : rates) {
        if (m.rows() != k || m.cols() != k)
            throw std::invalid_argument("rate matrix shape does not match node weights");
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j)))
                    throw std::invalid_argument("rates must be finite and non-negative");
    }

    if (regime_of_interval.empty() == regime_weights.empty())
        throw std::invalid_argument(
            "scenario needs exactly one of a fixed regime assignment or regime weights");
    if (!regime_of_interval.empty()) {
        if (static_cast<int>(regime_of_interval.size()) != grid.n_intervals())
            throw std::invalid_argument("regime assignment length does not match the grid");
        for (int r : regime_of_interval)
            if (r < 0 || r >= n_regimes())
                throw std::invalid_argument("regime index out of range");
    } else {
        if (static_cast<int>(regime_weights.size()) != n_regimes())
            throw std::invalid_argument("regime weights do not match the rate matrices");
        double rho = 0.0;
        for (double w : regime_weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("regime weights must be non-negative");
            rho += w;
        }
        if (std::abs(rho - 1.0) > 1e-9)
            throw std::invalid_argument("regime weights must sum to 1");
    }
}

namespace {

Array2<double> contrast_matrix(int k, double diag, double off) {
    Array2<double> m(k, k, off);
    for (int i = 0; i < k; ++i) m(i, i) = diag;
    return m;
}

Array2<double> scaled(const Array2<double>& m, double factor) {
    Array2<double> out = m;
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out(i, j) *= factor;
    return out;
}

double resolve_psi(double psi, double preset_default) {
    if (psi == 0.0) return preset_default;
    if (!(psi >= 1.0)) throw std::invalid_argument("psi must be at least 1");
    return psi;
}

// Two alternating regimes over [0, 100]: regime 0 on [0, 25) and [50, 75),
// regime 1 elsewhere. Shared by scenario1 and its finely binned variant.
std::vector<int> alternating_regimes(int n_intervals) {
    std::vector<int> y(n_intervals);
    for (int u = 0; u < n_intervals; ++u) {
        const double quarter = 4.0 * u / n_intervals;
        y[u] = (quarter < 1.0 || (quarter >= 2.0 && quarter < 3.0)) ? 0 : 1;
    }
    return y;
}

}  // namespace

SimScenario scenario_presets(const std::string& name, double psi) {
    SimScenario s;
    s.name = name;
    if (name == "scenario1" || name == "overfit") {
        const bool fine = name == "overfit";
        const double contrast = resolve_psi(psi, fine ? 1.4 : 2.0);
        s.psi = contrast;
        s.n_nodes = 50;
        s.grid = fine ? TimeGrid::uniform(1000, 100.0) : TimeGrid::uniform(100, 100.0);
        s.node_weights = {0.5, 0.5};
        s.rates.push_back(contrast_matrix(2, contrast, 1.0));   // within-cluster heavy
        s.rates.push_back(contrast_matrix(2, 1.0, contrast));   // between-cluster heavy
        s.regime_of_interval = alternating_regimes(s.grid.n_intervals());
    } else if (name == "scenario2" || name == "scenario2-K3" || name == "scenario2-k3") {
        const double contrast = resolve_psi(psi, 2.5);
        const int k = (name == "scenario2") ? 2 : 3;
        s.name = (k == 2) ? "scenario2" : "scenario2-K3";
        s.psi = contrast;
        s.n_nodes = 50;
        s.grid = TimeGrid::uniform(50, 50.0);
        s.node_weights.assign(k, 1.0 / k);
        const Array2<double> base = contrast_matrix(k, contrast, 2.0);
        s.rates.push_back(base);
        s.rates.push_back(scaled(base, 2.0));  // second half of the window doubles
        std::vector<int> y(50, 1);
        for (int u = 0; u < 25; ++u) y[u] = 0;
        s.regime_of_interval = std::move(y);
    } else {
        throw std::invalid_argument("unknown scenario preset '" + name + "'");
    }
    s.validate();
    return s;
}

std::vector<std::string> scenario_preset_names() {
    return {"scenario1", "overfit", "scenario2", "scenario2-K3"};
}

std::vector<int> sample_memberships(const std::vector<double>& weights, int n_items, Rng& rng) {
    if (n_items < 1) throw std::invalid_argument("need at least one item");
    std::vector<int> labels(n_items);
    for (int& l : labels) l = rng.categorical(weights);
    return labels;
}

std::vector<int> sample_regimes(const SimScenario& scenario, Rng& rng) {
    if (!scenario.regime_of_interval.empty()) return scenario.regime_of_interval;
    return sample_memberships(scenario.regime_weights, scenario.grid.n_intervals(), rng);
}

namespace {

void check_draw_inputs(const SimScenario& scenario, const std::vector<int>& z,
                       const std::vector<int>& y) {
    scenario.validate();
    if (static_cast<int>(z.size()) != scenario.n_nodes)
        throw std::invalid_argument("membership vector does not match the scenario");
    for (int l : z)
        if (l < 0 || l >= scenario.n_node_clusters())
            throw std::invalid_argument("membership label out of range");
    if (static_cast<int>(y.size()) != scenario.grid.n_intervals())
        throw std::invalid_argument("regime assignment does not match the grid");
    for (int r : y)
        if (r < 0 || r >= scenario.n_regimes())
            throw std::invalid_argument("regime index out of range");
}

}  // namespace

InteractionTensor sample_tensor(const SimScenario& scenario, const std::vector<int>& z,
                                const std::vector<int>& y, Rng& rng) {
    check_draw_inputs(scenario, z, y);
    const int n = scenario.n_nodes;
    const int u_count = scenario.grid.n_intervals();
    InteractionTensor tensor(n, scenario.grid);
    const uint64_t base = rng.next();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (int u = 0; u < u_count; ++u) {
                Rng cell = Rng::substream(base, i, j, u);
                const int c = cell.poisson(scenario.interval_mean(z[i], z[j], u, y));
                if (c > 0) tensor.add(i, j, u, c);
            }
        }
    }
    return tensor;
}

std::vector<Event> sample_events(const SimScenario& scenario, const std::vector<int>& z,
                                 const std::vector<int>& y, Rng& rng) {
    check_draw_inputs(scenario, z, y);
    const int n = scenario.n_nodes;
    const int u_count = scenario.grid.n_intervals();
    std::vector<Event> events;
    const uint64_t base = rng.next();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (int u = 0; u < u_count; ++u) {
                Rng cell = Rng::substream(base, i, j, u);
                const int c = cell.poisson(scenario.interval_mean(z[i], z[j], u, y));
                const double left = scenario.grid.breakpoint(u);
                const double width = scenario.grid.length(u);
                for (int e = 0; e < c; ++e)
                    events.push_back({i, j, left + width * cell.uniform01()});
            }
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.time, a.source, a.target) < std::tie(b.time, b.source, b.target);
    });
    return events;
}

SimDraw sample_scenario(const SimScenario& scenario, Rng& rng) {
    scenario.validate();
    std::vector<int> z = sample_memberships(scenario.node_weights, scenario.n_nodes, rng);
    std::vector<int> regimes = sample_regimes(scenario, rng);
    InteractionTensor tensor = sample_tensor(scenario, z, regimes, rng);
    return SimDraw{std::move(z), std::move(regimes), std::move(tensor)};
}

}  // namespace tsbm
