// Command-line front end. Links the shared library through its C API only.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowcit.h"

namespace {

using nlohmann::json;

int fail(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return code;
}

int fail_api(int code) { return fail(code, flowcit_last_error()); }

// ---- config file (key = value) ------------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty()) {
                throw CLI::ValidationError("--config", path + ":" + std::to_string(line_no) +
                                                           ": expected 'key = value'");
            }
            continue;
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// Tracks CLI options so that file values apply only where no flag was given:
// flags > config file > defaults.
class ConfigLayer {
public:
    explicit ConfigLayer(CLI::App* cmd) : cmd_(cmd) {}

    void bind(const std::string& key, CLI::Option* opt, std::string* target) {
        string_opts_[key] = {opt, target};
    }
    template <class T>
    void bind_numeric(const std::string& key, CLI::Option* opt, T* target) {
        numeric_opts_[key] = {opt, [target](const std::string& v) {
                                  std::istringstream ss(v);
                                  ss >> *target;
                                  return !ss.fail() && ss.eof();
                              }};
    }
    void bind_flag(const std::string& key, CLI::Option* opt, bool* target) {
        numeric_opts_[key] = {opt, [target](const std::string& v) {
                                  if (v == "1" || v == "true" || v == "yes") *target = true;
                                  else if (v == "0" || v == "false" || v == "no") *target = false;
                                  else return false;
                                  return true;
                              }};
    }

    void apply(const std::map<std::string, std::string>& kv) {
        for (const auto& [key, value] : kv) {
            if (auto it = string_opts_.find(key); it != string_opts_.end()) {
                if (it->second.first->count() == 0) *it->second.second = value;
                continue;
            }
            if (auto it = numeric_opts_.find(key); it != numeric_opts_.end()) {
                if (it->second.first->count() > 0) continue;
                if (!it->second.second(value)) {
                    throw CLI::ValidationError("--config", "bad value for key '" + key +
                                                               "': " + value);
                }
                continue;
            }
            throw CLI::ValidationError("--config", "unknown config key '" + key + "'");
        }
    }

private:
    CLI::App* cmd_;
    std::map<std::string, std::pair<CLI::Option*, std::string*>> string_opts_;
    std::map<std::string, std::pair<CLI::Option*, std::function<bool(const std::string&)>>>
        numeric_opts_;
};

// ---- shared test options --------------------------------------------------

struct TestOptions {
    int B = 100;
    int n2 = 0;
    int m = 1;
    std::string measure = "dc";
    std::string direction = "dc1";
    int ode_steps = 100;
    int width = 32;
    int epochs = 200;
    int batch = 128;
    double lr = 1e-3;
    bool single_draw = false;
    std::uint64_t seed = 42;
    double alpha = 0.05;
    int workers = 1;
    std::string config_path;
};

void add_test_options(CLI::App* cmd, TestOptions& o, ConfigLayer& layer, int default_width,
                      int default_m) {
    o.width = default_width;
    o.m = default_m;
    layer.bind_numeric("B", cmd->add_option("--B", o.B, "permutation count"), &o.B);
    layer.bind_numeric("n2", cmd->add_option("--n2", o.n2, "test-fold size (0 = floor(4*sqrt(n)))"),
                       &o.n2);
    layer.bind_numeric("m", cmd->add_option("--m", o.m, "number of disjoint splits"), &o.m);
    layer.bind(
        "measure",
        cmd->add_option("--measure", o.measure, "independence measure")->check(CLI::IsMember({"dc", "ipc"})),
        &o.measure);
    layer.bind("direction",
               cmd->add_option("--direction", o.direction, "tested reduction")
                   ->check(CLI::IsMember({"dc1", "dc2"})),
               &o.direction);
    layer.bind_numeric("ode-steps", cmd->add_option("--ode-steps", o.ode_steps, "integrator steps"),
                       &o.ode_steps);
    layer.bind_numeric("width", cmd->add_option("--width", o.width, "first hidden layer width"),
                       &o.width);
    layer.bind_numeric("epochs", cmd->add_option("--epochs", o.epochs, "training epochs"),
                       &o.epochs);
    layer.bind_numeric("batch", cmd->add_option("--batch", o.batch, "training batch size"),
                       &o.batch);
    layer.bind_numeric("lr", cmd->add_option("--lr", o.lr, "learning rate"), &o.lr);
    layer.bind_flag("single-draw",
                    cmd->add_flag("--single-draw", o.single_draw,
                                  "draw noise/times once instead of every epoch"),
                    &o.single_draw);
    layer.bind_numeric("seed", cmd->add_option("--seed", o.seed, "master RNG seed"), &o.seed);
    layer.bind_numeric("alpha", cmd->add_option("--alpha", o.alpha, "significance level"),
                       &o.alpha);
    layer.bind_numeric("workers", cmd->add_option("--workers", o.workers, "worker threads"),
                       &o.workers);
    cmd->add_option("--config", o.config_path, "key = value config file (flags take precedence)");
}

flowcit_config to_api_config(const TestOptions& o) {
    flowcit_config cfg;
    flowcit_config_defaults(&cfg);
    cfg.permutations = o.B;
    cfg.n2 = o.n2;
    cfg.num_splits = o.m;
    cfg.measure = o.measure == "ipc" ? FLOWCIT_MEASURE_IPC : FLOWCIT_MEASURE_DC;
    cfg.direction = o.direction == "dc2" ? FLOWCIT_DIRECTION_DC2 : FLOWCIT_DIRECTION_DC1;
    cfg.ode_steps = o.ode_steps;
    cfg.hidden_width = o.width;
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch;
    cfg.learning_rate = o.lr;
    cfg.resample_noise = o.single_draw ? 0 : 1;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    return cfg;
}

json config_echo(const TestOptions& o) {
    return json{{"B", o.B},
                {"n2", o.n2},
                {"m", o.m},
                {"measure", o.measure},
                {"direction", o.direction},
                {"ode-steps", o.ode_steps},
                {"width", o.width},
                {"epochs", o.epochs},
                {"batch", o.batch},
                {"lr", o.lr},
                {"single-draw", o.single_draw},
                {"seed", o.seed},
                {"alpha", o.alpha},
                {"workers", o.workers}};
}

// ---- subcommands ------------------------------------------------------------

struct TestArgs {
    std::string path_x, path_y, path_z;
    bool header = false;
    std::string out_path = "flowcit_report.json";
    TestOptions opts;
};

int cmd_test(const TestArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();

    flowcit_dataset* ds = nullptr;
    int rc = flowcit_dataset_from_csv(args.path_x.c_str(), args.path_y.c_str(),
                                      args.path_z.c_str(), args.header ? 1 : 0, &ds);
    if (rc != FLOWCIT_OK) return fail_api(rc);

    const flowcit_config cfg = to_api_config(args.opts);
    flowcit_report* report = nullptr;
    rc = flowcit_run_test(ds, &cfg, &report);
    if (rc != FLOWCIT_OK) {
        flowcit_dataset_free(ds);
        return fail_api(rc);
    }

    const double p_combined = flowcit_report_pvalue(report);
    const bool reject = p_combined <= args.opts.alpha;

    json splits = json::array();
    for (int k = 0; k < flowcit_report_num_splits(report); ++k) {
        splits.push_back({{"index", k},
                          {"n2", flowcit_report_split_test_size(report, k)},
                          {"statistic", flowcit_report_split_statistic(report, k)},
                          {"p_value", flowcit_report_split_pvalue(report, k)}});
    }

    json echo = config_echo(args.opts);
    echo["x"] = args.path_x;
    echo["y"] = args.path_y;
    echo["z"] = args.path_z;
    echo["header"] = args.header;
    echo["n2"] = flowcit_report_n2(report); // resolved fold size

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json doc{{"tool", "flowcit"},
             {"version", flowcit_version()},
             {"command", "test"},
             {"config", echo},
             {"data",
              {{"n", flowcit_dataset_n(ds)},
               {"dx", flowcit_dataset_dx(ds)},
               {"dy", flowcit_dataset_dy(ds)},
               {"dz", flowcit_dataset_dz(ds)}}},
             {"splits", splits},
             {"combined_p_value", p_combined},
             {"reject_at_alpha", reject},
             {"seed", flowcit_report_seed(report)},
             {"wall_clock_seconds", secs}};

    flowcit_report_free(report);
    flowcit_dataset_free(ds);

    std::ofstream out(args.out_path);
    if (!out) return fail(FLOWCIT_ERR_DATA, "cannot write report to " + args.out_path);
    out << doc.dump(2) << "\n";

    std::cout << "combined p-value: " << p_combined << "\n"
              << "decision at alpha=" << args.opts.alpha << ": "
              << (reject ? "reject" : "fail to reject") << "\n"
              << "report: " << args.out_path << "\n";
    return 0;
}

struct SimArgs {
    std::string model = "convergence";
    int setting = 1;
    double psi = 0.0;
    int n = 500;
    int reps = 200;
    int dx = 1, dy = 1, dz = 1;
    std::string out_path = "flowcit_simulation.csv";
    TestOptions opts;
};

int to_model_id(const std::string& name, int& out) {
    if (name == "convergence") out = FLOWCIT_MODEL_CONVERGENCE;
    else if (name == "univariate") out = FLOWCIT_MODEL_UNIVARIATE;
    else if (name == "low-low") out = FLOWCIT_MODEL_LOW_LOW;
    else if (name == "low-high") out = FLOWCIT_MODEL_LOW_HIGH;
    else if (name == "high-high") out = FLOWCIT_MODEL_HIGH_HIGH;
    else return FLOWCIT_ERR_CONFIG;
    return FLOWCIT_OK;
}

int run_simulation(const SimArgs& args, flowcit_sim_result** out) {
    int model_id = 0;
    if (to_model_id(args.model, model_id) != FLOWCIT_OK) {
        return fail(FLOWCIT_ERR_CONFIG, "unknown model '" + args.model + "'");
    }
    flowcit_sim_spec spec;
    spec.model = model_id;
    spec.setting = args.setting;
    spec.psi = args.psi;
    spec.dx = args.dx;
    spec.dy = args.dy;
    spec.dz = args.dz;
    spec.n = args.n;
    spec.reps = args.reps;
    spec.seed = args.opts.seed;

    const flowcit_config cfg = to_api_config(args.opts);
    const int rc = flowcit_run_simulation(&spec, &cfg, args.opts.alpha, out);
    if (rc != FLOWCIT_OK) return fail_api(rc);
    return 0;
}

int cmd_simulate(const SimArgs& args) {
    flowcit_sim_result* result = nullptr;
    if (int rc = run_simulation(args, &result)) return rc;

    std::ofstream out(args.out_path);
    if (!out) {
        flowcit_sim_result_free(result);
        return fail(FLOWCIT_ERR_DATA, "cannot write results to " + args.out_path);
    }
    char buf[64];
    out << "rep,seed,p_value\n";
    const int reps = flowcit_sim_result_reps(result);
    for (int r = 0; r < reps; ++r) {
        std::snprintf(buf, sizeof(buf), "%.10g", flowcit_sim_result_pvalue(result, r));
        out << r << "," << flowcit_sim_result_rep_seed(result, r) << "," << buf << "\n";
    }
    const double rate = flowcit_sim_result_rejection_rate(result);
    std::snprintf(buf, sizeof(buf), "%.10g", rate);
    out << "rejection_rate,alpha=" << args.opts.alpha << "," << buf << "\n";
    flowcit_sim_result_free(result);

    std::cout << "rejection rate at alpha=" << args.opts.alpha << ": " << rate
              << " (reps=" << reps << ")\n"
              << "results: " << args.out_path << "\n";
    return 0;
}

struct QqArgs {
    std::string input_path;
    std::string out_path;
    bool have_model = false;
    SimArgs sim;
};

int cmd_qq(const QqArgs& args) {
    std::vector<double> ps;
    if (!args.input_path.empty()) {
        double* buffer = nullptr;
        int count = 0;
        const int rc = flowcit_load_pvalues_csv(args.input_path.c_str(), &buffer, &count);
        if (rc != FLOWCIT_OK) return fail_api(rc);
        ps.assign(buffer, buffer + count);
        flowcit_free_buffer(buffer);
    } else if (args.have_model) {
        flowcit_sim_result* result = nullptr;
        if (int rc = run_simulation(args.sim, &result)) return rc;
        const int reps = flowcit_sim_result_reps(result);
        ps.resize(reps);
        for (int r = 0; r < reps; ++r) ps[r] = flowcit_sim_result_pvalue(result, r);
        flowcit_sim_result_free(result);
    } else {
        return fail(FLOWCIT_ERR_CONFIG, "qq needs --input or --model");
    }

    std::vector<double> theo(ps.size()), emp(ps.size());
    double ks = 0.0;
    const int rc = flowcit_qq(ps.data(), static_cast<int>(ps.size()), theo.data(), emp.data(), &ks);
    if (rc != FLOWCIT_OK) return fail_api(rc);

    std::cout << "ks_statistic " << ks << "\n";

    std::ostream* dest = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path);
        if (!file) return fail(FLOWCIT_ERR_DATA, "cannot write " + args.out_path);
        dest = &file;
    }
    char buf[64];
    *dest << "theoretical,empirical\n";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g", theo[i], emp[i]);
        *dest << buf << "\n";
    }
    if (!args.out_path.empty()) std::cout << "qq data: " << args.out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional independence testing via learned transport maps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(flowcit_version()));

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run the test on CSV data (X, Y, Z files)");
    ConfigLayer test_layer(test);
    test_layer.bind("x", test->add_option("--x", test_args.path_x, "CSV with X columns"),
                    &test_args.path_x);
    test_layer.bind("y", test->add_option("--y", test_args.path_y, "CSV with Y columns"),
                    &test_args.path_y);
    test_layer.bind("z", test->add_option("--z", test_args.path_z, "CSV with Z columns"),
                    &test_args.path_z);
    test_layer.bind_flag("header",
                         test->add_flag("--header", test_args.header, "files start with a header row"),
                         &test_args.header);
    test->add_option("--out", test_args.out_path, "report path (JSON)");
    add_test_options(test, test_args.opts, test_layer, /*default_width=*/32, /*default_m=*/1);

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Replicate a simulation model and report power");
    ConfigLayer sim_layer(sim);
    sim->add_option("--model", sim_args.model, "convergence|univariate|low-low|low-high|high-high")
        ->required();
    sim->add_option("--setting", sim_args.setting, "model setting 1..4");
    sim->add_option("--psi", sim_args.psi, "deviation from the null");
    sim->add_option("--n", sim_args.n, "sample size per replication");
    sim->add_option("--reps", sim_args.reps, "replication count");
    sim->add_option("--dx", sim_args.dx, "X dimension (convergence model)");
    sim->add_option("--dy", sim_args.dy, "Y dimension (convergence model)");
    sim->add_option("--dz", sim_args.dz, "Z dimension (convergence model)");
    sim->add_option("--out", sim_args.out_path, "per-replication CSV path");
    // width/m = 0 pick the per-model defaults
    add_test_options(sim, sim_args.opts, sim_layer, /*default_width=*/0, /*default_m=*/0);

    QqArgs qq_args;
    auto* qq = app.add_subcommand("qq", "Uniform QQ data and KS statistic for p-values");
    qq->add_option("--input", qq_args.input_path, "CSV of p-values (or simulate output)");
    auto* qq_model =
        qq->add_option("--model", qq_args.sim.model, "simulate this model instead of reading a file");
    qq->add_option("--setting", qq_args.sim.setting, "model setting 1..4");
    qq->add_option("--psi", qq_args.sim.psi, "deviation from the null");
    qq->add_option("--n", qq_args.sim.n, "sample size per replication");
    qq->add_option("--reps", qq_args.sim.reps, "replication count");
    qq->add_option("--dx", qq_args.sim.dx, "X dimension (convergence model)");
    qq->add_option("--dy", qq_args.sim.dy, "Y dimension (convergence model)");
    qq->add_option("--dz", qq_args.sim.dz, "Z dimension (convergence model)");
    qq->add_option("--out", qq_args.out_path, "two-column CSV path");
    ConfigLayer qq_layer(qq);
    add_test_options(qq, qq_args.sim.opts, qq_layer, /*default_width=*/0, /*default_m=*/0);

    try {
        app.parse(argc, argv);

        auto apply_config = [](ConfigLayer& layer, const std::string& path) {
            if (!path.empty()) layer.apply(read_config_file(path));
        };

        if (test->parsed()) {
            apply_config(test_layer, test_args.opts.config_path);
            if (test_args.path_x.empty() || test_args.path_y.empty() || test_args.path_z.empty()) {
                return fail(FLOWCIT_ERR_CONFIG, "test needs --x, --y and --z (flags or config file)");
            }
            return cmd_test(test_args);
        }
        if (sim->parsed()) {
            apply_config(sim_layer, sim_args.opts.config_path);
            return cmd_simulate(sim_args);
        }
        if (qq->parsed()) {
            apply_config(qq_layer, qq_args.sim.opts.config_path);
            qq_args.have_model = qq_model->count() > 0;
            return cmd_qq(qq_args);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return FLOWCIT_ERR_CONFIG;
    }
    return 0;
}
