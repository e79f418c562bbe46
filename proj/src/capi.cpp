#include "flowcit.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "flowcit/citest.hpp"
#include "flowcit/csv.hpp"
#include "flowcit/data.hpp"
#include "flowcit/errors.hpp"
#include "flowcit/simlab.hpp"

using flowcit::ConfigError;
using flowcit::DataError;
using flowcit::NumericError;

struct flowcit_dataset {
    flowcit::DataTriplet data;
};

struct flowcit_report {
    flowcit::citest::TestReport report;
};

struct flowcit_sim_result {
    flowcit::simlab::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class Fn>
int guarded(Fn&& fn) noexcept {
    try {
        fn();
        return FLOWCIT_OK;
    } catch (const ConfigError& e) {
        set_error(e.what());
        return FLOWCIT_ERR_CONFIG;
    } catch (const DataError& e) {
        set_error(e.what());
        return FLOWCIT_ERR_DATA;
    } catch (const NumericError& e) {
        set_error(e.what());
        return FLOWCIT_ERR_NUMERIC;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return FLOWCIT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FLOWCIT_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return FLOWCIT_ERR_INTERNAL;
    }
}

int require(bool condition, const char* msg) {
    if (condition) return FLOWCIT_OK;
    set_error(msg);
    return FLOWCIT_ERR_CONFIG;
}

flowcit::citest::FlowcitConfig to_core_config(const flowcit_config& cfg) {
    flowcit::citest::FlowcitConfig out;
    out.permutations = cfg.permutations;
    out.n2 = cfg.n2;
    out.num_splits = cfg.num_splits;
    out.measure = cfg.measure == FLOWCIT_MEASURE_IPC
                      ? flowcit::dep::MeasureKind::improved_projection_correlation
                      : flowcit::dep::MeasureKind::distance_correlation;
    out.direction = cfg.direction == FLOWCIT_DIRECTION_DC2 ? flowcit::citest::Direction::dc2
                                                           : flowcit::citest::Direction::dc1;
    out.flow.ode_steps = cfg.ode_steps;
    out.flow.hidden_width = cfg.hidden_width;
    out.flow.epochs = cfg.epochs;
    out.flow.batch_size = cfg.batch_size;
    out.flow.learning_rate = cfg.learning_rate;
    out.flow.resample_noise = cfg.resample_noise != 0;
    out.flow.seed = cfg.seed;
    out.workers = std::max(1, cfg.workers);
    return out;
}

flowcit::simlab::SimSpec to_core_spec(const flowcit_sim_spec& spec) {
    flowcit::simlab::SimSpec out;
    switch (spec.model) {
    case FLOWCIT_MODEL_CONVERGENCE: out.model = flowcit::simlab::Model::convergence; break;
    case FLOWCIT_MODEL_UNIVARIATE: out.model = flowcit::simlab::Model::univariate; break;
    case FLOWCIT_MODEL_LOW_LOW: out.model = flowcit::simlab::Model::low_low; break;
    case FLOWCIT_MODEL_LOW_HIGH: out.model = flowcit::simlab::Model::low_high; break;
    case FLOWCIT_MODEL_HIGH_HIGH: out.model = flowcit::simlab::Model::high_high; break;
    default: throw ConfigError("unknown simulation model id " + std::to_string(spec.model));
    }
    out.setting = spec.setting;
    out.psi = spec.psi;
    out.dx = spec.dx;
    out.dy = spec.dy;
    out.dz = spec.dz;
    out.n = spec.n;
    out.reps = spec.reps;
    out.seed = spec.seed;
    return out;
}

} // namespace

extern "C" {

const char* flowcit_version(void) { return "0.1.0"; }

const char* flowcit_last_error(void) { return g_last_error.c_str(); }

void flowcit_config_defaults(flowcit_config* cfg) {
    if (!cfg) return;
    cfg->permutations = 100;
    cfg->n2 = 0;
    cfg->num_splits = 1;
    cfg->measure = FLOWCIT_MEASURE_DC;
    cfg->direction = FLOWCIT_DIRECTION_DC1;
    cfg->ode_steps = 100;
    cfg->hidden_width = 32;
    cfg->epochs = 200;
    cfg->batch_size = 128;
    cfg->learning_rate = 1e-3;
    cfg->resample_noise = 1;
    cfg->seed = 42;
    cfg->workers = 1;
}

int flowcit_dataset_create(int n, int dx, int dy, int dz, const double* x, const double* y,
                           const double* z, flowcit_dataset** out) {
    if (int rc = require(out && x && y && z, "dataset_create: null argument")) return rc;
    return guarded([&] {
        auto copy = [n](const double* src, int d) {
            return flowcit::Matrix::from_data(
                n, d, std::vector<double>(src, src + static_cast<std::size_t>(n) * d));
        };
        auto data = flowcit::DataTriplet::validated(copy(x, dx), copy(y, dy), copy(z, dz));
        *out = new flowcit_dataset{std::move(data)};
    });
}

int flowcit_dataset_from_csv(const char* path_x, const char* path_y, const char* path_z,
                             int has_header, flowcit_dataset** out) {
    if (int rc = require(out && path_x && path_y && path_z, "dataset_from_csv: null argument")) {
        return rc;
    }
    return guarded([&] {
        auto data = flowcit::io::load_csv_triplet(path_x, path_y, path_z, has_header != 0);
        *out = new flowcit_dataset{std::move(data)};
    });
}

void flowcit_dataset_free(flowcit_dataset* ds) { delete ds; }

int flowcit_dataset_n(const flowcit_dataset* ds) { return ds ? ds->data.n() : -1; }
int flowcit_dataset_dx(const flowcit_dataset* ds) { return ds ? ds->data.dx() : -1; }
int flowcit_dataset_dy(const flowcit_dataset* ds) { return ds ? ds->data.dy() : -1; }
int flowcit_dataset_dz(const flowcit_dataset* ds) { return ds ? ds->data.dz() : -1; }

int flowcit_run_test(const flowcit_dataset* ds, const flowcit_config* cfg, flowcit_report** out) {
    if (int rc = require(ds && cfg && out, "run_test: null argument")) return rc;
    return guarded([&] {
        auto report = flowcit::citest::run_test(ds->data, to_core_config(*cfg));
        *out = new flowcit_report{std::move(report)};
    });
}

void flowcit_report_free(flowcit_report* report) { delete report; }

double flowcit_report_pvalue(const flowcit_report* report) {
    return report ? report->report.combined_p : -1.0;
}

int flowcit_report_num_splits(const flowcit_report* report) {
    return report ? static_cast<int>(report->report.splits.size()) : -1;
}

double flowcit_report_split_statistic(const flowcit_report* report, int split) {
    if (!report || split < 0 || split >= static_cast<int>(report->report.splits.size())) {
        return -1.0;
    }
    return report->report.splits[split].statistic;
}

double flowcit_report_split_pvalue(const flowcit_report* report, int split) {
    if (!report || split < 0 || split >= static_cast<int>(report->report.splits.size())) {
        return -1.0;
    }
    return report->report.splits[split].p_value;
}

int flowcit_report_split_test_size(const flowcit_report* report, int split) {
    if (!report || split < 0 || split >= static_cast<int>(report->report.splits.size())) {
        return -1;
    }
    return report->report.splits[split].test_size;
}

int flowcit_report_n2(const flowcit_report* report) { return report ? report->report.n2 : -1; }

uint64_t flowcit_report_seed(const flowcit_report* report) {
    return report ? report->report.seed : 0;
}

int flowcit_run_simulation(const flowcit_sim_spec* spec, const flowcit_config* cfg, double alpha,
                           flowcit_sim_result** out) {
    if (int rc = require(spec && cfg && out, "run_simulation: null argument")) return rc;
    return guarded([&] {
        const auto core_spec = to_core_spec(*spec);
        auto core_cfg = to_core_config(*cfg);
        // width/splits left at 0 pick the per-model defaults
        core_cfg.flow.hidden_width = cfg->hidden_width;
        core_cfg.num_splits = cfg->num_splits;
        flowcit::simlab::apply_model_defaults(core_spec, core_cfg);
        auto result = flowcit::simlab::run_experiment(core_spec, core_cfg, alpha);
        *out = new flowcit_sim_result{std::move(result)};
    });
}

void flowcit_sim_result_free(flowcit_sim_result* result) { delete result; }

int flowcit_sim_result_reps(const flowcit_sim_result* result) {
    return result ? static_cast<int>(result->result.pvalues.size()) : -1;
}

double flowcit_sim_result_pvalue(const flowcit_sim_result* result, int rep) {
    if (!result || rep < 0 || rep >= static_cast<int>(result->result.pvalues.size())) {
        return -1.0;
    }
    return result->result.pvalues[rep];
}

uint64_t flowcit_sim_result_rep_seed(const flowcit_sim_result* result, int rep) {
    if (!result || rep < 0 || rep >= static_cast<int>(result->result.rep_seeds.size())) {
        return 0;
    }
    return result->result.rep_seeds[rep];
}

double flowcit_sim_result_rejection_rate(const flowcit_sim_result* result) {
    return result ? result->result.rejection_rate : -1.0;
}

int flowcit_qq(const double* pvalues, int count, double* theoretical, double* empirical,
               double* ks_stat) {
    if (int rc = require(pvalues && theoretical && empirical, "qq: null argument")) return rc;
    if (int rc = require(count > 0, "qq: needs at least one p-value")) return rc;
    return guarded([&] {
        const auto pairs =
            flowcit::simlab::qq_data(std::span<const double>(pvalues, static_cast<std::size_t>(count)));
        double d = 0.0;
        for (int i = 0; i < count; ++i) {
            theoretical[i] = pairs[i].first;
            empirical[i] = pairs[i].second;
            d = std::max(d, std::abs(pairs[i].second - pairs[i].first));
        }
        if (ks_stat) *ks_stat = d;
    });
}

int flowcit_load_pvalues_csv(const char* path, double** out, int* count) {
    if (int rc = require(path && out && count, "load_pvalues_csv: null argument")) return rc;
    return guarded([&] {
        const auto ps = flowcit::io::load_pvalues_csv(path);
        double* buffer = new double[ps.size()];
        std::copy(ps.begin(), ps.end(), buffer);
        *out = buffer;
        *count = static_cast<int>(ps.size());
    });
}

void flowcit_free_buffer(double* buffer) { delete[] buffer; }

int flowcit_default_n2(int n) {
    int result = -1;
    const int rc = guarded([&] { result = flowcit::citest::default_n2(n); });
    return rc == FLOWCIT_OK ? result : -rc;
}

} // extern "C"
