#include "flowcit/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "flowcit/errors.hpp"
#include "flowcit/oracle.hpp"
#include "flowcit/parallel.hpp"
#include "flowcit/rng.hpp"

namespace flowcit::simlab {

namespace {

enum : std::uint64_t { kDataStream = 21, kTestStream = 22 };

Matrix gaussian_matrix(Rng& rng, int rows, int cols) { return rng.normal_matrix(rows, cols); }

// Gaussian entries in the leading block_rows x block_cols block, zero elsewhere.
Matrix block_gaussian(Rng& rng, int rows, int cols, int block_rows, int block_cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < block_rows; ++i) {
        for (int j = 0; j < block_cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

// Each entry is N(0,1) with probability keep_prob, else exactly zero.
Matrix bernoulli_gaussian(Rng& rng, int rows, int cols, double keep_prob) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (rng.uniform() < keep_prob) m(i, j) = rng.normal();
        }
    }
    return m;
}

Matrix student_t_matrix(Rng& rng, int rows, int cols, double dof) {
    Matrix m(rows, cols);
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = rng.student_t(dof);
    return m;
}

Matrix map_elementwise(Matrix m, double (*fn)(double)) {
    double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) d[i] = fn(d[i]);
    return m;
}

double square(double x) { return x * x; }

void check_setting(int setting, const char* model) {
    if (setting < 1 || setting > 4) {
        throw ConfigError(std::string(model) + ": setting must be in 1..4, got " +
                          std::to_string(setting));
    }
}

} // namespace

void SimSpec::validate() const {
    if (model != Model::convergence) {
        check_setting(setting, model_name(model));
    }
    if (psi < 0.0) throw ConfigError("simulation: psi must be nonnegative");
    if (dx < 1 || dy < 1 || dz < 1) throw ConfigError("simulation: dimensions must be >= 1");
    if (n < 4) throw ConfigError("simulation: sample size must be >= 4");
    if (reps < 1) throw ConfigError("simulation: replication count must be >= 1");
}

SimDraw gen_convergence(int dx, int dy, int dz, int n, std::uint64_t seed) {
    if (dx < 1 || dy < 1 || dz < 1 || n < 1) {
        throw ConfigError("gen_convergence: dimensions and n must be >= 1");
    }
    Rng rng(seed);
    Matrix b1 = gaussian_matrix(rng, dz, dx);
    Matrix b2 = gaussian_matrix(rng, dz, dy);
    Matrix z = gaussian_matrix(rng, n, dz);
    Matrix ex = gaussian_matrix(rng, n, dx);
    Matrix ey = gaussian_matrix(rng, n, dy);
    Matrix x = matmul(z, b1) + ex;
    Matrix y = matmul(z, b2) + ey;
    return SimDraw{DataTriplet{std::move(x), std::move(y), std::move(z)}, std::move(b1),
                   std::move(b2), Matrix()};
}

SimDraw gen_univariate(int setting, double psi, int n, std::uint64_t seed) {
    check_setting(setting, "univariate model");
    const int dx = 1, dy = 1, dz = 2;
    Rng rng(seed);
    Matrix b1 = gaussian_matrix(rng, dz, dx);
    Matrix b2 = gaussian_matrix(rng, dz, dy);
    Matrix b3 = gaussian_matrix(rng, dx, dy);
    Matrix z = gaussian_matrix(rng, n, dz);
    const bool heavy_tail = setting >= 3;
    Matrix ex = heavy_tail ? student_t_matrix(rng, n, dx, 3.0) : gaussian_matrix(rng, n, dx);
    Matrix ey = gaussian_matrix(rng, n, dy);

    Matrix x = setting == 4 ? map_elementwise(matmul(z, b1), std::cos) + ex
                            : matmul(z, b1) + ex;

    Matrix link = psi * matmul(x, b3);
    if (setting == 2) link = map_elementwise(std::move(link), std::exp);
    Matrix y = matmul(z, b2) + link + ey;

    return SimDraw{DataTriplet{std::move(x), std::move(y), std::move(z)}, std::move(b1),
                   std::move(b2), std::move(b3)};
}

SimDraw gen_lowlow(int setting, double psi, int n, std::uint64_t seed) {
    check_setting(setting, "low-low model");
    const int d = 3;
    Rng rng(seed);
    Matrix b1 = gaussian_matrix(rng, d, d);
    Matrix b2 = gaussian_matrix(rng, d, d);
    Matrix b3 = gaussian_matrix(rng, d, d);
    Matrix z = gaussian_matrix(rng, n, d);
    Matrix ex = gaussian_matrix(rng, n, d);
    Matrix ey = gaussian_matrix(rng, n, d);

    Matrix x = setting == 3 ? map_elementwise(matmul(z, b1), square) + ex
                            : matmul(z, b1) + ex;

    Matrix zb2 = matmul(z, b2);
    if (setting == 2) zb2 = map_elementwise(std::move(zb2), std::sin);

    Matrix link = psi * matmul(x, b3);
    if (setting == 4) link = map_elementwise(std::move(link), std::fabs);

    Matrix y = std::move(zb2) + link + ey;
    return SimDraw{DataTriplet{std::move(x), std::move(y), std::move(z)}, std::move(b1),
                   std::move(b2), std::move(b3)};
}

SimDraw gen_lowhigh(int setting, double psi, int n, std::uint64_t seed) {
    check_setting(setting, "low-high model");
    const int dx = 5, dy = 5, dz = 50;
    Rng rng(seed);

    Matrix b1, b2, b3;
    switch (setting) {
    case 1: // row-sparse B1, B2 (leading 3 rows), dense B3
        b1 = block_gaussian(rng, dz, dx, 3, dx);
        b2 = block_gaussian(rng, dz, dy, 3, dy);
        b3 = gaussian_matrix(rng, dx, dy);
        break;
    case 2: // leading 3x1 blocks everywhere
        b1 = block_gaussian(rng, dz, dx, 3, 1);
        b2 = block_gaussian(rng, dz, dy, 3, 1);
        b3 = block_gaussian(rng, dx, dy, 3, 1);
        break;
    case 3: // row-sparse B1, B2 (leading 2 rows), dense B3
        b1 = block_gaussian(rng, dz, dx, 2, dx);
        b2 = block_gaussian(rng, dz, dy, 2, dy);
        b3 = gaussian_matrix(rng, dx, dy);
        break;
    default: // dense
        b1 = gaussian_matrix(rng, dz, dx);
        b2 = gaussian_matrix(rng, dz, dy);
        b3 = gaussian_matrix(rng, dx, dy);
        break;
    }

    Matrix z = gaussian_matrix(rng, n, dz);
    Matrix ex = gaussian_matrix(rng, n, dx);
    Matrix ey = gaussian_matrix(rng, n, dy);

    Matrix x = setting == 4 ? map_elementwise(matmul(z, b1), std::sin) + ex
                            : matmul(z, b1) + ex;

    Matrix zb2 = matmul(z, b2);
    if (setting == 2) zb2 = map_elementwise(std::move(zb2), square);

    Matrix link;
    switch (setting) {
    case 2:
        link = (4.0 * psi) * matmul(x, b3);
        break;
    case 4:
        link = map_elementwise((5.0 * psi) * matmul(x, b3), std::fabs);
        break;
    default:
        link = psi * matmul(x, b3);
        break;
    }

    Matrix y = std::move(zb2) + link + ey;
    return SimDraw{DataTriplet{std::move(x), std::move(y), std::move(z)}, std::move(b1),
                   std::move(b2), std::move(b3)};
}

SimDraw gen_highhigh(int setting, double psi, int n, std::uint64_t seed) {
    check_setting(setting, "high-high model");
    const int d = 50;
    Rng rng(seed);

    Matrix b1, b2, b3;
    switch (setting) {
    case 1: // leading 2 rows of B1, B2; dense B3
        b1 = block_gaussian(rng, d, d, 2, d);
        b2 = block_gaussian(rng, d, d, 2, d);
        b3 = gaussian_matrix(rng, d, d);
        break;
    case 2: // leading row only
        b1 = block_gaussian(rng, d, d, 1, d);
        b2 = block_gaussian(rng, d, d, 1, d);
        b3 = gaussian_matrix(rng, d, d);
        break;
    case 3: // leading 3x3 blocks everywhere
        b1 = block_gaussian(rng, d, d, 3, 3);
        b2 = block_gaussian(rng, d, d, 3, 3);
        b3 = block_gaussian(rng, d, d, 3, 3);
        break;
    default: // independent 10% Bernoulli masks
        b1 = bernoulli_gaussian(rng, d, d, 0.1);
        b2 = bernoulli_gaussian(rng, d, d, 0.1);
        b3 = bernoulli_gaussian(rng, d, d, 0.1);
        break;
    }

    Matrix z = gaussian_matrix(rng, n, d);
    Matrix ex = gaussian_matrix(rng, n, d);
    Matrix ey = gaussian_matrix(rng, n, d);

    Matrix x = setting == 4 ? map_elementwise(matmul(z, b1), std::cos) + ex
                            : matmul(z, b1) + ex;

    Matrix zb2 = matmul(z, b2);
    if (setting == 4) zb2 = map_elementwise(std::move(zb2), std::sin);

    Matrix link = psi * matmul(x, b3);
    if (setting == 3) link = map_elementwise(std::move(link), std::fabs);

    Matrix y = std::move(zb2) + link + ey;
    return SimDraw{DataTriplet{std::move(x), std::move(y), std::move(z)}, std::move(b1),
                   std::move(b2), std::move(b3)};
}

SimDraw generate(const SimSpec& spec, std::uint64_t seed) {
    switch (spec.model) {
    case Model::convergence:
        return gen_convergence(spec.dx, spec.dy, spec.dz, spec.n, seed);
    case Model::univariate:
        return gen_univariate(spec.setting, spec.psi, spec.n, seed);
    case Model::low_low:
        return gen_lowlow(spec.setting, spec.psi, spec.n, seed);
    case Model::low_high:
        return gen_lowhigh(spec.setting, spec.psi, spec.n, seed);
    case Model::high_high:
        return gen_highhigh(spec.setting, spec.psi, spec.n, seed);
    }
    throw ConfigError("generate: unknown model");
}

void apply_model_defaults(const SimSpec& spec, citest::FlowcitConfig& cfg) {
    if (cfg.flow.hidden_width == 0) {
        switch (spec.model) {
        case Model::low_high:
            cfg.flow.hidden_width = 80;
            break;
        case Model::high_high:
            cfg.flow.hidden_width = 600;
            break;
        default:
            cfg.flow.hidden_width = 32;
            break;
        }
    }
    if (cfg.num_splits == 0) {
        switch (spec.model) {
        case Model::convergence:
            cfg.num_splits = 1;
            break;
        case Model::low_high:
        case Model::high_high:
            cfg.num_splits = 2;
            break;
        default:
            cfg.num_splits = 5;
            break;
        }
    }
}

std::vector<ExperimentResult> run_experiment_variants(const SimSpec& spec,
                                                      const citest::FlowcitConfig& cfg,
                                                      std::span<const citest::TestVariant> variants,
                                                      double alpha, bool use_oracle_fields) {
    spec.validate();
    if (variants.empty()) throw ConfigError("run_experiment: no variants requested");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("run_experiment: alpha must be in (0,1)");
    if (use_oracle_fields && spec.model != Model::convergence) {
        throw ConfigError("run_experiment: analytic velocity fields exist only for the "
                          "linear Gaussian model");
    }

    const int reps = spec.reps;
    std::vector<std::vector<double>> pvals(variants.size(), std::vector<double>(reps, 0.0));
    std::vector<std::uint64_t> rep_seeds(reps, 0);

    parallel_for(reps, cfg.workers, [&](int rep) {
        const std::uint64_t data_seed =
            derive_seed(spec.seed, {kDataStream, static_cast<std::uint64_t>(rep)});
        rep_seeds[rep] = data_seed;
        const SimDraw draw = generate(spec, data_seed);

        citest::FlowcitConfig run_cfg = cfg;
        run_cfg.workers = 1;
        run_cfg.flow.seed = derive_seed(spec.seed, {kTestStream, static_cast<std::uint64_t>(rep)});

        std::vector<citest::TestReport> reports;
        if (use_oracle_fields) {
            const oracle::GaussianLinearField field_x(draw.b1);
            const oracle::GaussianLinearField field_y(draw.b2);
            const citest::OracleFields fields{&field_x, &field_y};
            reports = citest::run_test_variants(draw.data, run_cfg, variants, &fields);
        } else {
            reports = citest::run_test_variants(draw.data, run_cfg, variants);
        }
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            pvals[vi][rep] = reports[vi].combined_p;
        }
    });

    std::vector<ExperimentResult> out;
    out.reserve(variants.size());
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        ExperimentResult res;
        res.spec = spec;
        res.alpha = alpha;
        res.pvalues = pvals[vi];
        res.rep_seeds = rep_seeds;
        int rejections = 0;
        for (double p : res.pvalues) {
            if (p <= alpha) ++rejections;
        }
        res.rejection_rate = static_cast<double>(rejections) / reps;
        res.variant = variants[vi];
        out.push_back(std::move(res));
    }
    return out;
}

ExperimentResult run_experiment(const SimSpec& spec, const citest::FlowcitConfig& cfg,
                                double alpha) {
    const citest::TestVariant variant{cfg.direction, cfg.measure};
    auto results = run_experiment_variants(spec, cfg,
                                           std::span<const citest::TestVariant>(&variant, 1),
                                           alpha);
    return std::move(results.front());
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> pvalues) {
    if (pvalues.empty()) throw ConfigError("qq_data: empty p-value list");
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        pairs.emplace_back((static_cast<double>(i) + 0.5) / n, sorted[i]);
    }
    return pairs;
}

double ks_statistic(std::span<const double> pvalues) {
    double d = 0.0;
    for (const auto& [theo, emp] : qq_data(pvalues)) {
        d = std::max(d, std::fabs(emp - theo));
    }
    return d;
}

const char* model_name(Model m) {
    switch (m) {
    case Model::convergence: return "convergence";
    case Model::univariate: return "univariate";
    case Model::low_low: return "low-low";
    case Model::low_high: return "low-high";
    case Model::high_high: return "high-high";
    }
    return "unknown";
}

bool parse_model(const std::string& name, Model& out) {
    if (name == "convergence") out = Model::convergence;
    else if (name == "univariate") out = Model::univariate;
    else if (name == "low-low") out = Model::low_low;
    else if (name == "low-high") out = Model::low_high;
    else if (name == "high-high") out = Model::high_high;
    else return false;
    return true;
}

} // namespace flowcit::simlab
