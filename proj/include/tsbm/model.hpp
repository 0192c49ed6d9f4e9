#pragma once

#include <stdexcept>
#include <string>

namespace tsbm {

// Model A: one intensity parameter per block and observation interval.
// Model B: intervals are additionally clustered; intensities are shared
// within each time cluster.
enum class Model { A, B };

inline std::string to_string(Model m) { return m == Model::A ? "A" : "B"; }

inline Model model_from_string(const std::string& s) {
    if (s == "A" || s == "a") return Model::A;
    if (s == "B" || s == "b") return Model::B;
    throw std::invalid_argument("unknown model '" + s + "', expected A or B");
}

// Hyper-parameters of the conjugate priors: Gamma(a, b) on block intensities,
// symmetric Dirichlet(alpha) on node cluster weights and Dirichlet(beta) on
// time cluster weights.
struct Priors {
    double a = 1.0;
    double b = 1.0;
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || !(alpha > 0.0) || !(beta > 0.0))
            throw std::invalid_argument("prior hyper-parameters must be positive");
    }
};

}  // namespace tsbm
