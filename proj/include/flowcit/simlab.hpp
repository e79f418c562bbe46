#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowcit/citest.hpp"
#include "flowcit/data.hpp"

namespace flowcit::simlab {

enum class Model {
    convergence, // linear Gaussian, H0 by construction; dims chosen per run
    univariate,  // dims (1, 1, 2)
    low_low,     // dims (3, 3, 3)
    low_high,    // dims (5, 5, 50)
    high_high,   // dims (50, 50, 50)
};

struct SimSpec {
    Model model = Model::convergence;
    int setting = 1;  // 1..4; ignored for the convergence model
    double psi = 0.0; // deviation parameter; 0 puts the triplet under H0
    int dx = 1, dy = 1, dz = 1; // used by the convergence model only
    int n = 500;
    int reps = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One generated dataset together with the parameter matrices it was built
/// from (fresh draws per call, as the replication engine requires).
struct SimDraw {
    DataTriplet data;
    Matrix b1; // d_z x d_x
    Matrix b2; // d_z x d_y
    Matrix b3; // d_x x d_y; empty for the convergence model
};

SimDraw gen_convergence(int dx, int dy, int dz, int n, std::uint64_t seed);
SimDraw gen_univariate(int setting, double psi, int n, std::uint64_t seed);
SimDraw gen_lowlow(int setting, double psi, int n, std::uint64_t seed);
SimDraw gen_lowhigh(int setting, double psi, int n, std::uint64_t seed);
SimDraw gen_highhigh(int setting, double psi, int n, std::uint64_t seed);

/// Dispatch on spec.model with the spec's dims/setting/psi.
SimDraw generate(const SimSpec& spec, std::uint64_t seed);

/// Model-specific defaults: network width p1 (32 / 80 / 600 by dimension
/// regime) and split count m (5 low-dimensional, 2 high-dimensional,
/// 1 for convergence runs). Applied only to fields left at 0.
void apply_model_defaults(const SimSpec& spec, citest::FlowcitConfig& cfg);

struct ExperimentResult {
    SimSpec spec;
    double alpha = 0.05;
    std::vector<double> pvalues;            // one per replication
    std::vector<std::uint64_t> rep_seeds;   // data seed per replication
    double rejection_rate = 0.0;            // #{p <= alpha} / reps
    citest::TestVariant variant;
};

/// Runs `spec.reps` replications: fresh data (fresh parameter matrices and
/// noise) per replication, then the full test. Per-replication seeds derive
/// from the spec seed, so results do not depend on the worker count.
ExperimentResult run_experiment(const SimSpec& spec, const citest::FlowcitConfig& cfg,
                                double alpha);

/// Same replications evaluated for several (direction, measure) variants
/// sharing each replication's trained flows and transports.
std::vector<ExperimentResult> run_experiment_variants(const SimSpec& spec,
                                                      const citest::FlowcitConfig& cfg,
                                                      std::span<const citest::TestVariant> variants,
                                                      double alpha, bool use_oracle_fields = false);

/// Sorted p-values paired with uniform quantiles (i - 0.5)/N.
std::vector<std::pair<double, double>> qq_data(std::span<const double> pvalues);

/// max_i |empirical - theoretical| over the QQ pairs.
double ks_statistic(std::span<const double> pvalues);

const char* model_name(Model m);
bool parse_model(const std::string& name, Model& out);

} // namespace flowcit::simlab
