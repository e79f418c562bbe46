#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowcit/data.hpp"
#include "flowcit/depmeasure.hpp"
#include "flowcit/flow.hpp"
#include "flowcit/matrix.hpp"

namespace flowcit::citest {

/// Which reduction of the conditional hypothesis is tested:
/// dc1 tests eta against (xi, Z); dc2 tests xi against (eta, Z).
enum class Direction { dc1, dc2 };

struct TestVariant {
    Direction direction = Direction::dc1;
    dep::MeasureKind measure = dep::MeasureKind::distance_correlation;
};

struct FlowcitConfig {
    int permutations = 100; // B
    int n2 = 0;             // test-fold size; 0 -> default_n2(n)
    int num_splits = 1;     // m
    Direction direction = Direction::dc1;
    dep::MeasureKind measure = dep::MeasureKind::distance_correlation;
    flow::FlowConfig flow; // network / ODE / training settings, incl. seed
    int workers = 1;

    std::uint64_t seed() const { return flow.seed; }
};

/// Disjoint test folds of exact size n2 plus their per-split training
/// complements, covering all n indices in every split.
struct SplitPlan {
    int n = 0;
    int n2 = 0;
    std::vector<std::vector<int>> test_folds;
    std::vector<std::vector<int>> train_folds;
    int num_splits() const { return static_cast<int>(test_folds.size()); }
};

struct SplitResult {
    int split_index = 0;
    int test_size = 0;
    int train_size = 0;
    double statistic = 0.0;
    double p_value = 0.0;
};

struct TestReport {
    std::vector<SplitResult> splits;
    double combined_p = 1.0;
    std::uint64_t seed = 0;
    int n = 0, dx = 0, dy = 0, dz = 0;
    int n2 = 0;
    TestVariant variant;
};

/// Recommended test-fold size: floor(4*sqrt(n)), clamped to [2, n-2].
int default_n2(int n);

SplitPlan make_splits(int n, int n2, int m, std::uint64_t seed);

/// (U, V) for the chosen direction: dc1 -> U = eta_hat, V = [xi_hat | Z];
/// dc2 -> U = xi_hat, V = [eta_hat | Z].
std::pair<Matrix, Matrix> pair_uv(const flow::TransportOutput& transported, const Matrix& z_fold,
                                  Direction direction);

/// Permutation test of independence between U and V: the statistic is the
/// squared (distance or improved-projection) correlation, and the p-value is
/// the tie-inclusive fraction of permuted statistics at least as large,
/// p = (1/B) * #{ T_b >= T }.
std::pair<double, double> permutation_pvalue(const Matrix& u, const Matrix& v, int permutations,
                                             dep::MeasureKind kind, std::uint64_t seed);

/// Cauchy combination of p-values from disjoint splits: each p is clamped to
/// [1e-10, 1 - 1e-10], T = mean of tan((0.5 - p)*pi), result 0.5 - atan(T)/pi.
double cauchy_combine(std::span<const double> pvalues);

/// Analytic velocity fields injected in place of training (test hook).
struct OracleFields {
    const flow::VelocityField* x = nullptr;
    const flow::VelocityField* y = nullptr;
};

/// The full pipeline: for each split, train both velocity fields on the
/// training fold, transport the test fold, and run the permutation test;
/// per-split p-values are Cauchy-combined.
TestReport run_test(const DataTriplet& data, const FlowcitConfig& cfg,
                    const OracleFields* oracle = nullptr);

/// Same pipeline evaluated for several (direction, measure) variants that
/// share the trained flows and transported latents. Permutation streams
/// depend only on (split, b), so variants see identical permutations.
std::vector<TestReport> run_test_variants(const DataTriplet& data, const FlowcitConfig& cfg,
                                          std::span<const TestVariant> variants,
                                          const OracleFields* oracle = nullptr);

const char* direction_name(Direction d);
const char* measure_name(dep::MeasureKind k);

} // namespace flowcit::citest
