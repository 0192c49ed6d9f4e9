#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "reference.hpp"
#include "tsbm/evaluate.hpp"

using namespace tsbm;

TEST_CASE("adjusted rand index on a worked example") {
    // Contingency of {0,1,2},{3,4,5} against {0,1},{2,3},{4,5}: cell pair sum
    // 2, row term 6, column term 3, 15 total pairs, so
    // (2 - 6*3/15) / ((6+3)/2 - 6*3/15) = 0.8 / 3.3 = 8/33.
    std::vector<int> a{0, 0, 0, 1, 1, 1};
    std::vector<int> b{0, 0, 1, 1, 2, 2};
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(8.0 / 33.0).epsilon(1e-13));
    CHECK(adjusted_rand_index(b, a) == doctest::Approx(8.0 / 33.0).epsilon(1e-13));
}

TEST_CASE("adjusted rand index fixed points") {
    std::vector<int> a{0, 1, 1, 2, 0};
    CHECK(adjusted_rand_index(a, a) == 1.0);

    // Label values are irrelevant, only the induced partition counts.
    std::vector<int> renamed{7, -3, -3, 100, 7};
    CHECK(adjusted_rand_index(a, renamed) == 1.0);

    // Both partitions trivial: the correction denominator vanishes.
    std::vector<int> ones(4, 0);
    CHECK(adjusted_rand_index(ones, ones) == 1.0);
    std::vector<int> singletons{0, 1, 2, 3};
    CHECK(adjusted_rand_index(singletons, singletons) == 1.0);

    // A split carrying no information about the other partition scores 0.
    CHECK(adjusted_rand_index({0, 0, 0, 0}, {0, 0, 1, 1}) == doctest::Approx(0.0).epsilon(1e-13));

    CHECK_THROWS_AS(adjusted_rand_index({0, 1}, {0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(adjusted_rand_index({}, {}), std::invalid_argument);
}

TEST_CASE("partition enumeration counts") {
    // Bell numbers when the cap is slack, partial Stirling sums otherwise.
    auto count = [](int n, int cap) {
        int64_t c = 0;
        for_each_partition(n, cap, [&](const std::vector<int>&, int) { ++c; });
        return c;
    };
    CHECK(count(1, 1) == 1);
    CHECK(count(3, 3) == 5);
    CHECK(count(4, 4) == 15);
    CHECK(count(5, 5) == 52);
    CHECK(count(4, 2) == 8);   // S(4,1) + S(4,2) = 1 + 7
    CHECK(count(5, 2) == 16);  // 1 + 15
    CHECK(count(6, 1) == 1);

    // Labels arrive as restricted growth strings: first item always 0 and
    // cluster count matches the largest label.
    for_each_partition(4, 3, [&](const std::vector<int>& labels, int k) {
        CHECK(labels[0] == 0);
        int top = 0;
        for (int l : labels) top = std::max(top, l);
        CHECK(k == top + 1);
    });
}

TEST_CASE("exhaustive optimum scans every candidate and maximizes") {
    Rng rng(404);
    InteractionTensor y = ref::random_tensor(5, 2, 1.0, rng);
    Priors priors;

    ExhaustiveResult res = exhaustive_icl_optimum(y, priors, Model::A, 5);
    CHECK(res.n_candidates == 52);  // Bell(5)
    CHECK_FALSE(res.time_clusters.has_value());

    // The reported score matches an independent evaluation of the reported
    // partition, and no enumerated candidate beats it.
    CHECK(res.log_icl ==
          doctest::Approx(ref::log_icl_a(y, res.z.labels(), res.z.n_clusters(), priors))
              .epsilon(1e-12));
    for_each_partition(5, 5, [&](const std::vector<int>& labels, int k) {
        CHECK(ref::log_icl_a(y, labels, k, priors) <= res.log_icl + 1e-9);
    });
}

TEST_CASE("exhaustive optimum recovers a planted split") {
    // Two noiseless communities: dense within the first three nodes and the
    // last three, sparse across.
    InteractionTensor y(6, TimeGrid::uniform(2, 2.0));
    std::vector<int> truth{0, 0, 0, 1, 1, 1};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            const int c = truth[i] == truth[j] ? 6 : 0;
            if (c > 0) {
                y.add(i, j, 0, c);
                y.add(i, j, 1, c);
            }
        }
    ExhaustiveResult res = exhaustive_icl_optimum(y, Priors{}, Model::A, 3);
    CHECK(adjusted_rand_index(res.z.labels(), truth) == 1.0);
}

TEST_CASE("joint exhaustive optimum covers both partitions") {
    Rng rng(405);
    InteractionTensor y = ref::random_tensor(4, 3, 1.2, rng);
    Priors priors;
    ExhaustiveResult res = exhaustive_icl_optimum(y, priors, Model::B, 4, 3);
    CHECK(res.n_candidates == 15 * 5);  // Bell(4) node times Bell(3) time partitions
    REQUIRE(res.time_clusters.has_value());
    CHECK(res.log_icl == doctest::Approx(ref::log_icl_b(
                                             y, res.z.labels(), res.z.n_clusters(),
                                             res.time_clusters->labels(),
                                             res.time_clusters->n_clusters(), priors))
                             .epsilon(1e-12));

    // Spot check a few random candidate pairs against the optimum.
    for (int rep = 0; rep < 20; ++rep) {
        const int k = 1 + rng.uniform_int(4);
        const int d = 1 + rng.uniform_int(3);
        std::vector<int> z = ref::random_compact_labels(4, k, rng);
        std::vector<int> tc = ref::random_compact_labels(3, d, rng);
        CHECK(ref::log_icl_b(y, z, k, tc, d, priors) <= res.log_icl + 1e-9);
    }
}

TEST_CASE("exhaustive search guard rails") {
    InteractionTensor small(3, TimeGrid::uniform(2, 2.0));
    InteractionTensor wide(9, TimeGrid::uniform(2, 2.0));
    InteractionTensor long_grid(3, TimeGrid::uniform(6, 6.0));
    CHECK_THROWS_AS(exhaustive_icl_optimum(wide, Priors{}, Model::A, 3), std::invalid_argument);
    CHECK_THROWS_AS(exhaustive_icl_optimum(long_grid, Priors{}, Model::B, 3, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(exhaustive_icl_optimum(small, Priors{}, Model::A, 3, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(exhaustive_icl_optimum(small, Priors{}, Model::B, 3), std::invalid_argument);
    CHECK_NOTHROW(exhaustive_icl_optimum(long_grid, Priors{}, Model::A, 2));
}
