#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tsbm/rng.hpp"
#include "tsbm/simulate.hpp"
#include "tsbm/tensor.hpp"

using namespace tsbm;

namespace {

// Fixed upper 1% quantiles of the chi-squared distribution for df 1..15.
const double kChi2Crit01[16] = {0.0,    6.635,  9.210,  11.345, 13.277, 15.086,
                                16.812, 18.475, 20.090, 21.666, 23.209, 24.725,
                                26.217, 27.688, 29.141, 30.578};

double poisson_pmf(int k, double mean) {
    return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

// Goodness-of-fit statistic of observed counts against a Poisson pmf, with
// the right tail pooled into the final bin.
double chi2_poisson(const std::vector<int64_t>& histogram, double mean, int64_t n_draws,
                    int first_bin, int n_bins, int* df) {
    double stat = 0.0;
    double tail_expected = static_cast<double>(n_draws);
    int64_t tail_observed = n_draws;
    for (int b = 0; b < n_bins - 1; ++b) {
        const int k = first_bin + b;
        const double expected = n_draws * poisson_pmf(k, mean);
        int64_t observed = 0;
        if (k < static_cast<int>(histogram.size())) observed = histogram[k];
        if (b == 0) {
            // Left tail pooled into the first bin.
            double left = 0.0;
            int64_t left_obs = 0;
            for (int j = 0; j < k; ++j) {
                left += n_draws * poisson_pmf(j, mean);
                left_obs += j < static_cast<int>(histogram.size()) ? histogram[j] : 0;
            }
            stat += (observed + left_obs - expected - left) *
                    (observed + left_obs - expected - left) / (expected + left);
            tail_expected -= expected + left;
            tail_observed -= observed + left_obs;
            continue;
        }
        stat += (observed - expected) * (observed - expected) / expected;
        tail_expected -= expected;
        tail_observed -= observed;
    }
    stat += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
    *df = n_bins - 1;
    return stat;
}

std::vector<int64_t> histogram_of(const std::vector<int>& draws) {
    std::vector<int64_t> h;
    for (int d : draws) {
        if (d >= static_cast<int>(h.size())) h.resize(d + 1, 0);
        ++h[d];
    }
    return h;
}

SimScenario flat_scenario(int n_nodes, int n_intervals, double horizon, double rate) {
    SimScenario s;
    s.name = "flat";
    s.n_nodes = n_nodes;
    s.grid = TimeGrid::uniform(n_intervals, horizon);
    s.node_weights = {1.0};
    s.rates.emplace_back(1, 1, rate);
    s.regime_of_interval.assign(n_intervals, 0);
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("preset: two alternating regimes on one hundred unit intervals") {
    SimScenario s = scenario_presets("scenario1");
    CHECK(s.n_nodes == 50);
    CHECK(s.grid.n_intervals() == 100);
    CHECK(s.grid.horizon() == doctest::Approx(100.0));
    CHECK(s.grid.length(7) == doctest::Approx(1.0));
    CHECK(s.n_node_clusters() == 2);
    CHECK(s.node_weights == std::vector<double>{0.5, 0.5});
    CHECK(s.psi == 2.0);
    REQUIRE(s.n_regimes() == 2);
    CHECK(s.rates[0](0, 0) == 2.0);
    CHECK(s.rates[0](0, 1) == 1.0);
    CHECK(s.rates[1](0, 0) == 1.0);
    CHECK(s.rates[1](1, 0) == 2.0);

    REQUIRE(s.regime_of_interval.size() == 100);
    for (int u = 0; u < 100; ++u) {
        const bool first_regime = u < 25 || (u >= 50 && u < 75);
        CHECK(s.regime_of_interval[u] == (first_regime ? 0 : 1));
    }

    SimScenario stronger = scenario_presets("scenario1", 3.5);
    CHECK(stronger.rates[0](0, 0) == 3.5);
    CHECK_THROWS_AS(scenario_presets("scenario1", 0.5), std::invalid_argument);
    CHECK_THROWS_AS(scenario_presets("nope"), std::invalid_argument);
}

TEST_CASE("preset: finely binned variant keeps the process, shrinks the bins") {
    SimScenario s = scenario_presets("overfit");
    CHECK(s.grid.n_intervals() == 1000);
    CHECK(s.grid.horizon() == doctest::Approx(100.0));
    CHECK(s.grid.length(0) == doctest::Approx(0.1));
    CHECK(s.psi == 1.4);

    // Expected per-pair counts per interval: rate times bin length.
    const std::vector<int>& y = s.regime_of_interval;
    CHECK(s.interval_mean(0, 0, 0, y) == doctest::Approx(0.14).epsilon(1e-12));
    CHECK(s.interval_mean(0, 1, 0, y) == doctest::Approx(0.10).epsilon(1e-12));

    // Regime blocks scale with the finer grid: 250 intervals per quarter.
    CHECK(y[0] == 0);
    CHECK(y[249] == 0);
    CHECK(y[250] == 1);
    CHECK(y[499] == 1);
    CHECK(y[500] == 0);
    CHECK(y[999] == 1);
}

TEST_CASE("preset: second window half doubles all rates") {
    SimScenario s = scenario_presets("scenario2");
    CHECK(s.grid.n_intervals() == 50);
    CHECK(s.grid.horizon() == doctest::Approx(50.0));
    CHECK(s.n_node_clusters() == 2);
    CHECK(s.psi == 2.5);
    CHECK(s.rates[0](0, 0) == 2.5);
    CHECK(s.rates[0](0, 1) == 2.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(s.rates[1](i, j) == doctest::Approx(2.0 * s.rates[0](i, j)));
    for (int u = 0; u < 50; ++u) CHECK(s.regime_of_interval[u] == (u < 25 ? 0 : 1));

    SimScenario k3 = scenario_presets("scenario2-K3");
    CHECK(k3.n_node_clusters() == 3);
    CHECK(k3.node_weights[0] == doctest::Approx(1.0 / 3.0));
    CHECK(k3.rates[0](2, 2) == 2.5);
    CHECK(k3.rates[0](2, 0) == 2.0);

    auto names = scenario_preset_names();
    CHECK(names == std::vector<std::string>{"scenario1", "overfit", "scenario2", "scenario2-K3"});
    for (const auto& n : names) CHECK_NOTHROW(scenario_presets(n));
}

TEST_CASE("true cumulative intensity accumulates the regime path") {
    SimScenario s = scenario_presets("scenario1");
    const std::vector<int>& y = s.regime_of_interval;
    std::vector<double> within = s.true_cumulative(0, 0, y);
    std::vector<double> across = s.true_cumulative(0, 1, y);
    REQUIRE(within.size() == 101);
    CHECK(within[0] == 0.0);
    CHECK(within[25] == doctest::Approx(50.0));
    CHECK(within[50] == doctest::Approx(75.0));
    CHECK(within[75] == doctest::Approx(125.0));
    CHECK(within[100] == doctest::Approx(150.0));
    CHECK(across[25] == doctest::Approx(25.0));
    CHECK(across[100] == doctest::Approx(150.0));
    for (size_t i = 1; i < within.size(); ++i) CHECK(within[i] >= within[i - 1]);
}

TEST_CASE("scenario validation rejects malformed inputs") {
    SimScenario s = flat_scenario(4, 3, 3.0, 1.0);
    CHECK_NOTHROW(s.validate());

    SimScenario bad = s;
    bad.node_weights = {0.7, 0.7};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = s;
    bad.rates[0](0, 0) = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = s;
    bad.rates.emplace_back(2, 2, 1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = s;
    bad.regime_weights = {1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // both fixed and random

    bad = s;
    bad.regime_of_interval.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // neither

    bad = s;
    bad.regime_of_interval[1] = 5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("membership sampling hits the expected frequencies") {
    Rng rng(2024);
    std::vector<int> z = sample_memberships({0.5, 0.5}, 25000, rng);
    int64_t zeros = std::count(z.begin(), z.end(), 0);
    // 99% binomial band around 12500: 2.576 * sqrt(25000 * 0.25) ~ 204.
    CHECK(zeros >= 12296);
    CHECK(zeros <= 12704);

    std::vector<int> all_one = sample_memberships({0.0, 1.0}, 500, rng);
    CHECK(std::count(all_one.begin(), all_one.end(), 1) == 500);

    CHECK_THROWS_AS(sample_memberships({0.5, 0.5}, 0, rng), std::invalid_argument);
}

TEST_CASE("regime sampling: fixed assignments pass through, weights draw") {
    Rng rng(7);
    SimScenario fixed = scenario_presets("scenario1");
    CHECK(sample_regimes(fixed, rng) == fixed.regime_of_interval);

    SimScenario random_regimes = flat_scenario(4, 200, 200.0, 1.0);
    random_regimes.rates.emplace_back(1, 1, 2.0);
    random_regimes.regime_of_interval.clear();
    random_regimes.regime_weights = {0.5, 0.5};
    random_regimes.validate();
    std::vector<int> y = sample_regimes(random_regimes, rng);
    REQUIRE(y.size() == 200);
    int64_t zeros = std::count(y.begin(), y.end(), 0);
    // 99% band: 100 +- 2.576 * sqrt(200 * 0.25) ~ 18.2.
    CHECK(zeros >= 81);
    CHECK(zeros <= 119);
}

TEST_CASE("tensor cells are Poisson with mean rate times bin length") {
    // One block, constant unit rate on half-length bins: every off-diagonal
    // cell is an independent Poisson(1) count, 1800 cells in total.
    SimScenario s = flat_scenario(10, 20, 10.0, 2.0);
    Rng rng(31);
    std::vector<int> z(10, 0);
    InteractionTensor y = sample_tensor(s, z, s.regime_of_interval, rng);

    std::vector<int> draws;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            if (i == j) continue;
            for (int u = 0; u < 20; ++u) draws.push_back(y.count(i, j, u));
        }
    REQUIRE(draws.size() == 1800);

    int df = 0;
    const double stat =
        chi2_poisson(histogram_of(draws), 1.0, static_cast<int64_t>(draws.size()), 0, 6, &df);
    REQUIRE(df == 5);
    CHECK(stat < kChi2Crit01[df]);
}

TEST_CASE("large-mean counts follow the Poisson law too") {
    // Mean far above the direct-sampling cutoff exercises the halving path.
    SimScenario s = flat_scenario(2, 2000, 2000.0, 40.0);
    Rng rng(57);
    std::vector<int> z(2, 0);
    InteractionTensor y = sample_tensor(s, z, s.regime_of_interval, rng);
    std::vector<int> draws;
    for (int u = 0; u < 2000; ++u) {
        draws.push_back(y.count(0, 1, u));
        draws.push_back(y.count(1, 0, u));
    }
    // Poisson(40): pool below 27, single bins 27..52, pool above.
    int df = 0;
    const double stat = chi2_poisson(histogram_of(draws), 40.0,
                                     static_cast<int64_t>(draws.size()), 27, 15, &df);
    REQUIRE(df == 14);
    CHECK(stat < kChi2Crit01[df]);
}

TEST_CASE("equal seeds reproduce the tensor bit for bit") {
    SimScenario s = scenario_presets("scenario2", 2.2);
    Rng rng_z(9);
    std::vector<int> z = sample_memberships(s.node_weights, s.n_nodes, rng_z);
    std::vector<int> y = s.regime_of_interval;

    Rng r1(123), r2(123), r3(124);
    InteractionTensor t1 = sample_tensor(s, z, y, r1);
    InteractionTensor t2 = sample_tensor(s, z, y, r2);
    InteractionTensor t3 = sample_tensor(s, z, y, r3);

    bool identical = true;
    bool any_diff = false;
    for (int i = 0; i < s.n_nodes; ++i)
        for (int j = 0; j < s.n_nodes; ++j) {
            if (i == j) continue;
            for (int u = 0; u < s.grid.n_intervals(); ++u) {
                identical = identical && t1.count(i, j, u) == t2.count(i, j, u);
                any_diff = any_diff || t1.count(i, j, u) != t3.count(i, j, u);
            }
        }
    CHECK(identical);
    CHECK(any_diff);
}

TEST_CASE("event draws bin back to exactly the tensor draws") {
    SimScenario s = flat_scenario(6, 5, 10.0, 0.8);
    Rng rng_t(88), rng_e(88);
    std::vector<int> z(6, 0);
    InteractionTensor direct = sample_tensor(s, z, s.regime_of_interval, rng_t);
    std::vector<Event> events = sample_events(s, z, s.regime_of_interval, rng_e);
    InteractionTensor binned = build_tensor(events, s.grid, 6);

    CHECK(binned.total() == direct.total());
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            for (int u = 0; u < 5; ++u) CHECK(binned.count(i, j, u) == direct.count(i, j, u));
        }

    CHECK(std::is_sorted(events.begin(), events.end(),
                         [](const Event& a, const Event& b) { return a.time < b.time; }));
    for (const Event& e : events) {
        CHECK(e.source != e.target);
        CHECK(e.time >= 0.0);
        CHECK(e.time <= s.grid.horizon());
    }
}

TEST_CASE("event timestamps are uniform within their interval") {
    SimScenario s = flat_scenario(12, 1, 2.0, 4.0);
    Rng rng(3);
    std::vector<int> z(12, 0);
    std::vector<Event> events = sample_events(s, z, s.regime_of_interval, rng);
    REQUIRE(events.size() > 600);  // mean 12*11*8 > 1000

    double sum = 0.0;
    for (const Event& e : events) sum += e.time;
    const double mean = sum / events.size();
    // Uniform on [0, 2]: mean 1, sd 2/sqrt(12); 4-sigma CLT band.
    const double band = 4.0 * (2.0 / std::sqrt(12.0)) / std::sqrt(double(events.size()));
    CHECK(mean > 1.0 - band);
    CHECK(mean < 1.0 + band);
}

TEST_CASE("one-call draw wires memberships, regimes and counts together") {
    SimScenario s = scenario_presets("scenario2-K3", 3.0);
    Rng r1(42), r2(42);
    SimDraw d1 = sample_scenario(s, r1);
    SimDraw d2 = sample_scenario(s, r2);
    REQUIRE(d1.z.size() == 50);
    REQUIRE(d1.regimes.size() == 50);
    CHECK(d1.z == d2.z);
    CHECK(d1.regimes == d2.regimes);
    CHECK(d1.tensor.total() == d2.tensor.total());
    for (int l : d1.z) {
        CHECK(l >= 0);
        CHECK(l < 3);
    }
    CHECK(d1.regimes == s.regime_of_interval);
    CHECK(d1.tensor.total() > 0);
}
