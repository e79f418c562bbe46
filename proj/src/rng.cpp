#include "flowcit/rng.hpp"

#include <algorithm>
#include <numeric>

namespace flowcit {

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = mix64(base);
    for (std::uint64_t t : tags) {
        h = mix64(h ^ mix64(t));
    }
    return h;
}

double Rng::student_t(double dof) {
    std::student_t_distribution<double> dist(dof);
    return dist(engine_);
}

Matrix Rng::normal_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = normal_(engine_);
    return m;
}

std::vector<double> Rng::uniform_vector(int n) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform_(engine_);
    return v;
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), engine_);
    return p;
}

} // namespace flowcit
