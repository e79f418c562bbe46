#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "flowcit/matrix.hpp"

namespace flowcit {

// Derives an independent stream seed from a base seed and a list of stream
// tags (split index, permutation index, ...). Tasks seeded this way can run
// in any order or in parallel without changing results.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return uniform_(engine_); }
    double normal() { return normal_(engine_); }
    double student_t(double dof);

    Matrix normal_matrix(int rows, int cols);
    std::vector<double> uniform_vector(int n);

    // Uniformly random permutation of {0, ..., n-1}.
    std::vector<int> permutation(int n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace flowcit
