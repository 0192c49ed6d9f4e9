#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tsbm {

// Deterministic, platform-independent PRNG (splitmix64). Every sampling
// routine used by the toolkit is built on top of it, so a seeded run
// reproduces byte for byte regardless of the standard library in use.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Derived stream: hash-chains the tags into an independent generator.
    // Used to give every (pair, interval) cell of the simulator its own
    // stream, so binned and event-level draws of the same cell agree.
    static Rng substream(uint64_t seed, uint64_t t0, uint64_t t1 = 0, uint64_t t2 = 0) {
        uint64_t s = mix(seed);
        s = mix(s ^ t0);
        s = mix(s ^ t1);
        s = mix(s ^ t2);
        return Rng(s);
    }

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n). Lemire's multiply-shift; the slight bias for
    // astronomically large n is irrelevant at the sizes used here.
    int uniform_int(int n) {
        assert(n > 0);
        return static_cast<int>(
            (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // Fisher-Yates shuffle.
    template <typename V>
    void shuffle(V& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            int j = uniform_int(i + 1);
            auto tmp = v[i];
            v[i] = v[j];
            v[j] = tmp;
        }
    }

    // Poisson draw, Knuth's product method. Means above 32 are split with the
    // additivity of the Poisson law so exp(-mean) never underflows.
    int poisson(double mean) {
        assert(mean >= 0.0);
        if (mean <= 0.0) return 0;
        if (mean > 32.0) {
            double half = mean * 0.5;
            return poisson(half) + poisson(mean - half);
        }
        const double limit = std::exp(-mean);
        double prod = 1.0;
        int n = 0;
        do {
            prod *= uniform01();
            ++n;
        } while (prod > limit);
        return n - 1;
    }

    // Index draw proportional to non-negative weights (need not be normalised).
    int categorical(const std::vector<double>& weights) {
        assert(!weights.empty());
        double total = 0.0;
        for (double w : weights) {
            assert(w >= 0.0);
            total += w;
        }
        assert(total > 0.0);
        double u = uniform01() * total;
        double cum = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            cum += weights[i];
            if (u < cum) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    uint64_t state_;
};

}  // namespace tsbm
