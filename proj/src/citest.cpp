#include "flowcit/citest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flowcit/errors.hpp"
#include "flowcit/parallel.hpp"
#include "flowcit/rng.hpp"

namespace flowcit::citest {

namespace {

enum : std::uint64_t {
    kSplitStream = 11,
    kTrainXStream = 12,
    kTrainYStream = 13,
    kPermStream = 14,
};

constexpr double kPClampLow = 1e-10;

} // namespace

int default_n2(int n) {
    if (n < 4) throw ConfigError("default_n2: needs n >= 4, got " + std::to_string(n));
    const int raw = static_cast<int>(std::floor(4.0 * std::sqrt(static_cast<double>(n))));
    return std::clamp(raw, 2, n - 2);
}

SplitPlan make_splits(int n, int n2, int m, std::uint64_t seed) {
    if (n2 < 2) throw ConfigError("make_splits: n2 must be >= 2");
    if (n2 > n) throw ConfigError("make_splits: n2 exceeds n");
    if (m < 1) throw ConfigError("make_splits: need at least one split");
    const int max_folds = n / n2;
    if (m > max_folds) {
        throw ConfigError("make_splits: m = " + std::to_string(m) +
                          " disjoint test folds of size " + std::to_string(n2) +
                          " do not fit in n = " + std::to_string(n) +
                          " (at most " + std::to_string(max_folds) + ")");
    }

    Rng rng(derive_seed(seed, {kSplitStream}));
    const std::vector<int> order = rng.permutation(n);

    SplitPlan plan;
    plan.n = n;
    plan.n2 = n2;
    for (int k = 0; k < m; ++k) {
        std::vector<int> test(order.begin() + static_cast<std::ptrdiff_t>(k) * n2,
                              order.begin() + static_cast<std::ptrdiff_t>(k + 1) * n2);
        std::vector<bool> in_test(n, false);
        for (int idx : test) in_test[idx] = true;
        std::vector<int> train;
        train.reserve(n - n2);
        for (int i = 0; i < n; ++i) {
            if (!in_test[i]) train.push_back(i);
        }
        std::sort(test.begin(), test.end());
        plan.test_folds.push_back(std::move(test));
        plan.train_folds.push_back(std::move(train));
    }
    return plan;
}

std::pair<Matrix, Matrix> pair_uv(const flow::TransportOutput& transported, const Matrix& z_fold,
                                  Direction direction) {
    if (transported.xi_hat.rows() != z_fold.rows() ||
        transported.eta_hat.rows() != z_fold.rows()) {
        throw ConfigError("pair_uv: transported latents and Z fold row counts disagree");
    }
    if (direction == Direction::dc1) {
        return {transported.eta_hat, hcat(transported.xi_hat, z_fold)};
    }
    return {transported.xi_hat, hcat(transported.eta_hat, z_fold)};
}

namespace {

std::pair<double, double> permutation_pvalue_kernels(const dep::CenteredKernel& ku,
                                                     const dep::CenteredKernel& kv,
                                                     int permutations, std::uint64_t seed) {
    const int n = ku.a.rows();
    const double t_obs = dep::statistic_from_kernels(ku, kv);
    const double den = std::sqrt(std::max(ku.self_cov2, 0.0)) *
                       std::sqrt(std::max(kv.self_cov2, 0.0));
    int count = 0;
    for (int b = 1; b <= permutations; ++b) {
        Rng rng(derive_seed(seed, {kPermStream, static_cast<std::uint64_t>(b)}));
        const std::vector<int> pi = rng.permutation(n);
        const double num = dep::centered_product_mean_permuted(ku.a, kv.a, pi);
        const double t_b = den > 0.0 ? std::max(num, 0.0) / den : 0.0;
        if (t_b >= t_obs) ++count;
    }
    return {t_obs, static_cast<double>(count) / permutations};
}

} // namespace

std::pair<double, double> permutation_pvalue(const Matrix& u, const Matrix& v, int permutations,
                                             dep::MeasureKind kind, std::uint64_t seed) {
    if (permutations < 1) throw ConfigError("permutation_pvalue: needs at least one permutation");
    if (u.rows() != v.rows() || u.rows() < 2) {
        throw ConfigError("permutation_pvalue: needs matching row counts >= 2");
    }
    const dep::CenteredKernel ku = dep::centered_kernel(u, kind);
    const dep::CenteredKernel kv = dep::centered_kernel(v, kind);
    return permutation_pvalue_kernels(ku, kv, permutations, seed);
}

double cauchy_combine(std::span<const double> pvalues) {
    if (pvalues.empty()) throw ConfigError("cauchy_combine: empty p-value list");
    double t = 0.0;
    for (double p : pvalues) {
        if (p < 0.0 || p > 1.0) {
            throw ConfigError("cauchy_combine: p-value outside [0, 1]");
        }
        const double clamped = std::clamp(p, kPClampLow, 1.0 - kPClampLow);
        t += std::tan((0.5 - clamped) * M_PI);
    }
    t /= static_cast<double>(pvalues.size());
    return 0.5 - std::atan(t) / M_PI;
}

const char* direction_name(Direction d) { return d == Direction::dc1 ? "dc1" : "dc2"; }

const char* measure_name(dep::MeasureKind k) {
    return k == dep::MeasureKind::distance_correlation ? "dc" : "ipc";
}

std::vector<TestReport> run_test_variants(const DataTriplet& data, const FlowcitConfig& cfg,
                                          std::span<const TestVariant> variants,
                                          const OracleFields* oracle) {
    if (variants.empty()) throw ConfigError("run_test_variants: no variants requested");
    if (data.n() < 4) throw ConfigError("flowcit: needs at least 4 samples");
    if (data.dx() < 1 || data.dy() < 1 || data.dz() < 1) {
        throw ConfigError("flowcit: all of X, Y, Z must have at least one column");
    }
    if (cfg.permutations < 1) throw ConfigError("flowcit: permutation count must be >= 1");
    if (oracle && (!oracle->x || !oracle->y)) {
        throw ConfigError("flowcit: oracle mode requires both velocity fields");
    }

    const int n = data.n();
    const int n2 = cfg.n2 > 0 ? cfg.n2 : default_n2(n);
    const SplitPlan plan = make_splits(n, n2, cfg.num_splits, cfg.seed());

    const int m = plan.num_splits();
    // per-variant, per-split results
    std::vector<std::vector<SplitResult>> results(variants.size(),
                                                  std::vector<SplitResult>(m));

    parallel_for(m, cfg.workers, [&](int k) {
        const auto& test_idx = plan.test_folds[k];
        const auto& train_idx = plan.train_folds[k];

        const DataTriplet fold{take_rows(data.x, test_idx), take_rows(data.y, test_idx),
                               take_rows(data.z, test_idx)};

        flow::TransportOutput transported;
        if (oracle) {
            transported = flow::transport_dataset(*oracle->x, *oracle->y, fold,
                                                  cfg.flow.ode_steps);
        } else {
            flow::FlowConfig fx = cfg.flow;
            fx.seed = derive_seed(cfg.seed(), {kTrainXStream, static_cast<std::uint64_t>(k)});
            flow::FlowConfig fy = cfg.flow;
            fy.seed = derive_seed(cfg.seed(), {kTrainYStream, static_cast<std::uint64_t>(k)});

            const Matrix train_z = take_rows(data.z, train_idx);
            const nn::VelocityNet net_x =
                flow::fit_velocity(take_rows(data.x, train_idx), train_z, fx);
            const nn::VelocityNet net_y =
                flow::fit_velocity(take_rows(data.y, train_idx), train_z, fy);

            transported = flow::transport_dataset(flow::NetVelocityField(net_x),
                                                  flow::NetVelocityField(net_y), fold,
                                                  cfg.flow.ode_steps);
        }

        // Kernels are cached per (direction, measure) pair actually needed.
        const std::uint64_t perm_seed =
            derive_seed(cfg.seed(), {kPermStream, static_cast<std::uint64_t>(k)});
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            const auto [u, v] = pair_uv(transported, fold.z, variants[vi].direction);
            const dep::CenteredKernel ku = dep::centered_kernel(u, variants[vi].measure);
            const dep::CenteredKernel kv = dep::centered_kernel(v, variants[vi].measure);
            const auto [stat, p] =
                permutation_pvalue_kernels(ku, kv, cfg.permutations, perm_seed);
            results[vi][k] = SplitResult{k, static_cast<int>(test_idx.size()),
                                         static_cast<int>(train_idx.size()), stat, p};
        }
    });

    std::vector<TestReport> reports;
    reports.reserve(variants.size());
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        TestReport report;
        report.splits = std::move(results[vi]);
        std::vector<double> ps;
        ps.reserve(report.splits.size());
        for (const auto& s : report.splits) ps.push_back(s.p_value);
        report.combined_p = cauchy_combine(ps);
        report.seed = cfg.seed();
        report.n = n;
        report.dx = data.dx();
        report.dy = data.dy();
        report.dz = data.dz();
        report.n2 = n2;
        report.variant = variants[vi];
        reports.push_back(std::move(report));
    }
    return reports;
}

TestReport run_test(const DataTriplet& data, const FlowcitConfig& cfg,
                    const OracleFields* oracle) {
    const TestVariant variant{cfg.direction, cfg.measure};
    auto reports = run_test_variants(data, cfg, std::span<const TestVariant>(&variant, 1), oracle);
    return std::move(reports.front());
}

} // namespace flowcit::citest
