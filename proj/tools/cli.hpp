#pragma once

// Command-line front end: solve, sweep, rip, bound, check-jacobian,
// counterexample. Exit codes: 0 ok, 1 usage/config error, 2 infeasible step
// size, 3 diverged.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "CLI11.hpp"
#include "nliht/nliht.hpp"

namespace nliht::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kDiverged = 3 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::string constraint_kind = "ksparse";
    Index block_size = 1;
    Index k_blocks = 1;
    TrialSettings settings;
    std::vector<Index> sweep_m;
    std::vector<Index> sweep_k;
    std::vector<double> sweep_scale;
    std::size_t sweep_trials = 1;

    ConstraintSet constraint() const {
        if (constraint_kind == "block") return ConstraintSet::uniform_blocks(problem.n, block_size, k_blocks);
        return ConstraintSet::k_sparse(problem.n, problem.k);
    }
};

namespace detail {

inline std::string where(const std::string& path, const YAML::Node& node) {
    const YAML::Mark m = node.Mark();
    if (m.is_null()) return path;
    return path + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

template <class T>
T read(const std::string& path, const YAML::Node& parent, const char* key, T fallback) {
    const YAML::Node node = parent[key];
    if (!node) return fallback;
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where(path, node) + ": invalid value for '" + key + "'");
    }
}

template <class T>
std::vector<T> read_list(const std::string& path, const YAML::Node& parent, const char* key) {
    const YAML::Node node = parent[key];
    if (!node) return {};
    try {
        if (node.IsScalar()) return {node.as<T>()};
        return node.as<std::vector<T>>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where(path, node) + ": invalid list for '" + key + "'");
    }
}

inline void require(bool ok, const std::string& path, const YAML::Node& node, const std::string& msg) {
    if (!ok) throw ConfigError(where(path, node) + ": " + msg);
}

inline void reject_unknown(const std::string& path, const YAML::Node& node, std::initializer_list<const char*> known) {
    if (!node || !node.IsMap()) return;
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(where(path, kv.first) + ": unknown key '" + key + "'");
    }
}

}  // namespace detail

/// Parses and range-checks an experiment config before any computation.
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw ConfigError(path + ": cannot open config file");
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg);
    }
    using detail::read;
    using detail::require;
    if (!root.IsMap()) throw ConfigError(path + ":1:1: top level must be a mapping");
    detail::reject_unknown(path, root, {"problem", "constraint", "solver", "report", "sweep"});

    ExperimentConfig cfg;
    const YAML::Node p = root["problem"];
    require(p && p.IsMap(), path, root, "missing 'problem' section");
    detail::reject_unknown(path, p, {"n", "m", "k", "ensemble", "matrix_file", "nonlinearity", "noise_sigma", "seed"});
    auto& spec = cfg.problem;
    const long n = read<long>(path, p, "n", 0), m = read<long>(path, p, "m", 0), k = read<long>(path, p, "k", 0);
    require(n >= 1, path, p["n"] ? p["n"] : p, "problem.n must be >= 1");
    require(m >= 1, path, p["m"] ? p["m"] : p, "problem.m must be >= 1");
    require(k >= 1 && k <= n, path, p["k"] ? p["k"] : p, "problem.k must satisfy 1 <= k <= n");
    spec.n = n;
    spec.m = m;
    spec.k = k;
    const std::string ens = read<std::string>(path, p, "ensemble", "gaussian");
    if (ens == "gaussian") {
        spec.ensemble = Ensemble::Gaussian;
    } else if (ens == "identity") {
        spec.ensemble = Ensemble::Identity;
        require(m == n, path, p["ensemble"], "identity ensemble needs m == n");
    } else if (ens == "file") {
        spec.ensemble = Ensemble::Explicit;
        const std::string file = read<std::string>(path, p, "matrix_file", "");
        require(!file.empty(), path, p["ensemble"], "ensemble 'file' needs matrix_file");
        try {
            spec.explicit_matrix = read_matrix_file(file);
        } catch (const InvalidInput& e) {
            throw ConfigError(detail::where(path, p["matrix_file"]) + ": " + e.what());
        }
        require(spec.explicit_matrix->rows() == m && spec.explicit_matrix->cols() == n, path, p["matrix_file"],
                "matrix file dimensions differ from problem.m x problem.n");
    } else {
        throw ConfigError(detail::where(path, p["ensemble"]) + ": unknown ensemble '" + ens + "'");
    }
    if (const YAML::Node h = p["nonlinearity"]) {
        detail::reject_unknown(path, h, {"kind", "scale", "radius"});
        try {
            spec.h_kind = nonlinearity_from_string(read<std::string>(path, h, "kind", "identity"));
        } catch (const InvalidInput& e) {
            throw ConfigError(detail::where(path, h["kind"]) + ": " + e.what());
        }
        spec.h_scale = read<double>(path, h, "scale", 0.0);
        spec.h_radius = read<double>(path, h, "radius", 1.0);
        try {
            (void)spec.nonlinearity();
        } catch (const InvalidInput& e) {
            throw ConfigError(detail::where(path, h) + ": " + e.what());
        }
    }
    spec.noise_sigma = read<double>(path, p, "noise_sigma", 0.0);
    require(spec.noise_sigma >= 0.0, path, p["noise_sigma"], "noise_sigma must be >= 0");
    spec.seed = read<std::uint64_t>(path, p, "seed", 0);

    if (const YAML::Node c = root["constraint"]) {
        detail::reject_unknown(path, c, {"kind", "block_size", "k_blocks"});
        cfg.constraint_kind = read<std::string>(path, c, "kind", "ksparse");
        require(cfg.constraint_kind == "ksparse" || cfg.constraint_kind == "block", path, c["kind"] ? c["kind"] : c,
                "constraint.kind must be 'ksparse' or 'block'");
        if (cfg.constraint_kind == "block") {
            cfg.block_size = read<long>(path, c, "block_size", 1);
            cfg.k_blocks = read<long>(path, c, "k_blocks", 1);
            require(cfg.block_size >= 1 && n % cfg.block_size == 0, path, c, "block_size must divide problem.n");
            require(cfg.k_blocks >= 1 && cfg.k_blocks <= n / cfg.block_size, path, c, "k_blocks out of range");
        }
    }

    auto& ts = cfg.settings;
    if (const YAML::Node s = root["solver"]) {
        detail::reject_unknown(path, s,
                               {"algorithm", "mu", "check_admissible", "max_iterations", "residual_tolerance",
                                "iterate_change_tolerance", "record_trace", "rip_trials", "c_trials"});
        const std::string algo = read<std::string>(path, s, "algorithm", "niht");
        require(algo == "niht" || algo == "pgd", path, s["algorithm"] ? s["algorithm"] : s,
                "solver.algorithm must be 'niht' or 'pgd'");
        ts.algorithm = algo == "niht" ? Algorithm::Niht : Algorithm::Pgd;
        if (const YAML::Node mu = s["mu"]; mu && mu.as<std::string>() != "auto") {
            ts.mu = read<double>(path, s, "mu", 1.0);
            require(*ts.mu > 0.0, path, mu, "solver.mu must be positive or 'auto'");
        }
        ts.check_admissible = read<bool>(path, s, "check_admissible", true);
        const long iters = read<long>(path, s, "max_iterations", 1000);
        require(iters >= 1, path, s["max_iterations"], "max_iterations must be >= 1");
        ts.solver.max_iterations = static_cast<std::size_t>(iters);
        ts.solver.residual_tolerance = read<double>(path, s, "residual_tolerance", 1e-8);
        require(ts.solver.residual_tolerance >= 0.0, path, s["residual_tolerance"], "residual_tolerance must be >= 0");
        ts.solver.iterate_change_tolerance = read<double>(path, s, "iterate_change_tolerance", 1e-10);
        require(ts.solver.iterate_change_tolerance >= 0.0, path, s["iterate_change_tolerance"],
                "iterate_change_tolerance must be >= 0");
        ts.solver.record_trace = read<bool>(path, s, "record_trace", false);
        const long rt = read<long>(path, s, "rip_trials", 2000), ct = read<long>(path, s, "c_trials", 2000);
        require(rt >= 1, path, s["rip_trials"], "rip_trials must be >= 1");
        require(ct >= 1, path, s["c_trials"], "c_trials must be >= 1");
        ts.rip_trials = static_cast<std::size_t>(rt);
        ts.c_trials = static_cast<std::size_t>(ct);
    }
    if (const YAML::Node r = root["report"]) {
        detail::reject_unknown(path, r, {"success_threshold", "bounds"});
        ts.success_threshold = read<double>(path, r, "success_threshold", 1e-4);
        require(ts.success_threshold > 0.0, path, r["success_threshold"], "success_threshold must be positive");
        ts.compute_bounds = read<bool>(path, r, "bounds", false);
    }
    if (const YAML::Node sw = root["sweep"]) {
        detail::reject_unknown(path, sw, {"m", "k", "scale", "trials"});
        for (long v : detail::read_list<long>(path, sw, "m")) {
            require(v >= 1, path, sw["m"], "sweep.m entries must be >= 1");
            cfg.sweep_m.push_back(v);
        }
        for (long v : detail::read_list<long>(path, sw, "k")) {
            require(v >= 1, path, sw["k"], "sweep.k entries must be >= 1");
            cfg.sweep_k.push_back(v);
        }
        cfg.sweep_scale = detail::read_list<double>(path, sw, "scale");
        const long trials = read<long>(path, sw, "trials", 1);
        require(trials >= 1, path, sw["trials"], "sweep.trials must be >= 1");
        cfg.sweep_trials = static_cast<std::size_t>(trials);
    }
    if (cfg.sweep_m.empty()) cfg.sweep_m = {spec.m};
    if (cfg.sweep_k.empty()) cfg.sweep_k = {spec.k};
    if (cfg.sweep_scale.empty()) cfg.sweep_scale = {spec.h_scale};
    return cfg;
}

namespace detail {

inline void emit(const KeyValues& kv, const std::string& out_path) {
    write_key_values(std::cout, kv);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + out_path + "'");
        write_key_values(f, kv);
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << content;
}

inline std::string trace_csv(const RecoveryResult& r) {
    std::ostringstream os;
    os << "iteration,objective,iterate_change,active,e_a_norm,target_distance\n";
    for (const auto& e : r.trace) {
        os << e.iteration << ',' << fmt_double(e.objective) << ',' << fmt_double(e.iterate_change) << ',';
        for (std::size_t i = 0; i < e.active.size(); ++i) os << (i ? ";" : "") << e.active[i];
        os << ',' << (e.e_a_norm ? fmt_double(*e.e_a_norm) : "") << ','
           << (e.target_distance ? fmt_double(*e.target_distance) : "") << '\n';
    }
    return os.str();
}

}  // namespace detail

struct Options {
    std::string config;
    std::string out;
    std::string trace;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::size_t trials = 0;
    std::size_t points = 10;
    double step = 1e-6;
    std::string variant = "both";
    // bound inputs
    double alpha = 0.0, beta = 0.0, mu = 0.0, c_lin = 0.0, m_bound = 0.0;
    double delta = 0.01, x_norm = 1.0, dist = 0.0, e_a = 0.0, f_opt = 0.0;
    std::vector<double> residuals;
};

inline ExperimentConfig config_with_seed(const Options& o) {
    ExperimentConfig cfg = load_config(o.config);
    if (o.seed) cfg.problem.seed = *o.seed;
    return cfg;
}

inline int cmd_solve(const Options& o) {
    const ExperimentConfig cfg = config_with_seed(o);
    TrialSettings ts = cfg.settings;
    if (!o.trace.empty()) ts.solver.record_trace = true;
    const TrialRecord rec = run_trial(cfg.problem, ts);

    std::ostringstream csv;
    const auto& cols = trial_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
    csv << '\n' << trial_csv_row(rec) << '\n';
    if (!o.out.empty()) detail::write_file(o.out, csv.str());
    if (!o.trace.empty() && !rec.skipped) detail::write_file(o.trace, detail::trace_csv(rec.result));

    KeyValues kv{{"alpha_hat", fmt_double(rec.alpha_hat)}, {"beta_hat", fmt_double(rec.beta_hat)},
                 {"C_hat", fmt_double(rec.c_hat)},         {"mu_used", fmt_double(rec.mu_used)},
                 {"stop_reason", rec.stop_reason}};
    if (rec.skipped) {
        kv.emplace_back("error", rec.skip_reason);
        write_key_values(std::cout, kv);
        std::cerr << "infeasible step size mu=" << fmt_double(rec.mu_used) << ": requires "
                  << (ts.algorithm == Algorithm::Niht ? kNihtStepCondition : kPgdStepCondition) << '\n';
        return kInfeasible;
    }
    kv.emplace_back("iterations", std::to_string(rec.iterations));
    kv.emplace_back("residual", fmt_double(rec.residual));
    kv.emplace_back("error", fmt_double(rec.error));
    kv.emplace_back("rel_error", fmt_double(rec.rel_error));
    kv.emplace_back("success", rec.success ? "true" : "false");
    if (rec.bounds) {
        for (auto& [k, v] : to_key_values(*rec.bounds, true, true)) kv.emplace_back("corollary1." + k, v);
    }
    write_key_values(std::cout, kv);
    if (rec.diverged) {
        std::cerr << "diverged at iteration " << rec.iterations << '\n';
        return kDiverged;
    }
    return kOk;
}

inline int cmd_sweep(const Options& o) {
    const ExperimentConfig cfg = config_with_seed(o);
    SweepSpec sweep;
    sweep.base = cfg.problem;
    sweep.ms = cfg.sweep_m;
    sweep.ks = cfg.sweep_k;
    sweep.scales = cfg.sweep_scale;
    sweep.trials_per_cell = cfg.sweep_trials;
    sweep.base_seed = cfg.problem.seed;
    sweep.settings = cfg.settings;
    sweep.settings.solver.record_trace = false;
    sweep.jobs = o.jobs;
    const std::string csv = sweep_csv(run_sweep(sweep));
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        detail::write_file(o.out, csv);
    }
    return kOk;
}

inline int cmd_rip(const Options& o) {
    const ExperimentConfig cfg = config_with_seed(o);
    const Problem p = generate_problem(cfg.problem);
    const ConstraintSet set = cfg.constraint();
    const std::size_t trials = o.trials ? o.trials : cfg.settings.rip_trials;
    KeyValues kv = to_key_values(estimate_rip(p.model, set, trials, derive_seed(cfg.problem.seed, 1)));
    for (auto& [k, v] : to_key_values(estimate_C(p.model, set, trials, derive_seed(cfg.problem.seed, 2)))) {
        if (k != "trials") kv.emplace_back(k, v);
    }
    detail::emit(kv, o.out);
    return kOk;
}

inline int cmd_check_jacobian(const Options& o) {
    const ExperimentConfig cfg = config_with_seed(o);
    const Problem p = generate_problem(cfg.problem);
    std::mt19937_64 rng(derive_seed(cfg.problem.seed, 3));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double box = cfg.problem.h_kind == NonlinearityKind::Cubic ? 0.9 * cfg.problem.h_radius : 1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < o.points; ++i) {
        Vector x(p.model.cols());
        for (Index j = 0; j < x.size(); ++j) x[j] = box * unif(rng);
        worst = std::max(worst, fd_jacobian_check(p.model, x, o.step));
    }
    detail::emit({{"max_deviation", fmt_double(worst)},
                  {"points", std::to_string(o.points)},
                  {"step", fmt_double(o.step)},
                  {"model", p.model.is_linear() ? "linear" : to_string(p.model.nonlinearity().kind())}},
                 o.out);
    return kOk;
}

inline int cmd_counterexample(const Options& o) {
    const ExperimentConfig cfg = config_with_seed(o);
    const Problem p = generate_problem(cfg.problem);
    const std::size_t trials = o.trials ? o.trials : 1000;
    const ConvexityWitness w = convexity_counterexample(p.model, cfg.constraint(), derive_seed(cfg.problem.seed, 4),
                                                       trials);
    detail::emit(to_key_values(w), o.out);
    return kOk;
}

inline std::pair<bool, bool> variants(const std::string& v) { return {v != "derived", v != "printed"}; }

inline int cmd_bound(const std::string& kind, const Options& o) {
    const auto [printed, derived] = variants(o.variant);
    KeyValues kv;
    if (kind == "theorem1") {
        if (o.residuals.empty()) throw InvalidInput("theorem1 needs --residuals");
        kv = to_key_values(theorem1_report(o.alpha, o.mu, o.residuals, o.x_norm, o.delta, o.dist));
    } else if (kind == "corollary1") {
        kv = to_key_values(corollary1_report(o.alpha, o.mu, o.c_lin, o.e_a, o.dist), printed, derived);
    } else if (kind == "theorem2") {
        kv = to_key_values(theorem2_report(o.alpha, o.mu, o.f_opt, o.x_norm, o.delta, o.dist), printed, derived);
    } else if (kind == "lemma1") {
        kv = to_key_values(lemma1_constants(o.alpha, o.beta, o.m_bound), printed, derived);
    } else if (kind == "lemma2") {
        kv = {{"C", fmt_double(lemma2_constant(o.beta, o.m_bound))}};
    } else if (kind == "step-niht" || kind == "step-pgd") {
        const bool niht = kind == "step-niht";
        const auto w = niht ? admissible_step_niht(o.alpha, o.beta, o.c_lin) : admissible_step_pgd(o.alpha, o.beta);
        kv.emplace_back("condition", niht ? kNihtStepCondition : kPgdStepCondition);
        kv.emplace_back("feasible", w ? "true" : "false");
        if (w) {
            kv.emplace_back("mu_lower", fmt_double(w->lower));
            kv.emplace_back("mu_lower_open", w->lower_open ? "true" : "false");
            kv.emplace_back("mu_upper", fmt_double(w->upper));
            kv.emplace_back("mu_upper_open", w->upper_open ? "true" : "false");
        }
        detail::emit(kv, o.out);
        return w ? kOk : kInfeasible;
    }
    detail::emit(kv, o.out);
    return kOk;
}

/// Parses argv and dispatches. Never calls exit().
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Nonlinear iterative hard thresholding: recovery, sweeps, constants and bounds", "nliht"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* sub, bool config, bool seed) {
        if (config) sub->add_option("--config", o.config, "Experiment config (YAML)")->required();
        if (seed) sub->add_option("--seed", o.seed, "Seed overriding problem.seed");
        sub->add_option("--out", o.out, "Output file");
    };

    auto* solve = app.add_subcommand("solve", "Generate a problem and recover it");
    add_common(solve, true, true);
    solve->add_option("--trace", o.trace, "Per-iteration trace CSV");

    auto* sweep = app.add_subcommand("sweep", "Run a grid of trials and write aggregate CSV");
    add_common(sweep, true, true);
    sweep->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* rip = app.add_subcommand("rip", "Estimate RIP and linearisation constants");
    add_common(rip, true, true);
    rip->add_option("--trials", o.trials, "Samples (default: solver.rip_trials)");

    auto* jac = app.add_subcommand("check-jacobian", "Finite-difference check of the analytic Jacobian");
    add_common(jac, true, true);
    jac->add_option("--step", o.step, "Difference step in [1e-8, 1e-3]");
    jac->add_option("--points", o.points, "Random points")->check(CLI::PositiveNumber);

    auto* cex = app.add_subcommand("counterexample", "Search for a convexity violation of ||y - Phi(x)||^2");
    add_common(cex, true, true);
    cex->add_option("--trials", o.trials, "Trial budget (default 1000)");

    auto* bound = app.add_subcommand("bound", "Evaluate step windows, constants and error bounds");
    bound->require_subcommand(1);
    std::string bound_kind;
    const auto variant_opt = [&](CLI::App* s) {
        s->add_option("--variant", o.variant, "printed, derived or both")
            ->check(CLI::IsMember({"printed", "derived", "both"}));
    };
    {
        auto* s = bound->add_subcommand("theorem1", "eps^k, k* and error bound of the IHT iteration");
        s->add_option("--alpha", o.alpha)->required();
        s->add_option("--mu", o.mu)->required();
        s->add_option("--residuals", o.residuals, "||e_A^n|| for n = 0..k-1")->required()->delimiter(',');
        s->add_option("--x-norm", o.x_norm, "||x_A||");
        s->add_option("--delta", o.delta);
        s->add_option("--dist", o.dist, "||x_A - x||");
        variant_opt(s);
        add_common(s, false, false);
    }
    {
        auto* s = bound->add_subcommand("corollary1", "Error constant with a linearisation bound C");
        s->add_option("--alpha", o.alpha)->required();
        s->add_option("--mu", o.mu)->required();
        s->add_option("--C", o.c_lin);
        s->add_option("--e-a", o.e_a, "||y - Phi(x_A)||");
        s->add_option("--dist", o.dist, "||x_A - x||");
        variant_opt(s);
        add_common(s, false, false);
    }
    {
        auto* s = bound->add_subcommand("theorem2", "n* and error bound of projected gradient descent");
        s->add_option("--alpha", o.alpha)->required();
        s->add_option("--mu", o.mu)->required();
        s->add_option("--f-opt", o.f_opt)->required();
        s->add_option("--x-norm", o.x_norm, "||x_opt||");
        s->add_option("--delta", o.delta);
        s->add_option("--dist", o.dist, "||x - x_opt||");
        variant_opt(s);
        add_common(s, false, false);
    }
    {
        auto* s = bound->add_subcommand("lemma1", "RIP constants of Phi_bar (I + H')");
        s->add_option("--alpha", o.alpha)->required();
        s->add_option("--beta", o.beta)->required();
        s->add_option("--M", o.m_bound)->required();
        variant_opt(s);
        add_common(s, false, false);
    }
    {
        auto* s = bound->add_subcommand("lemma2", "Linearisation constant C = beta M");
        s->add_option("--beta", o.beta)->required();
        s->add_option("--M", o.m_bound)->required();
        add_common(s, false, false);
    }
    for (const char* name : {"step-niht", "step-pgd"}) {
        auto* s = bound->add_subcommand(name, "Admissible step-size window");
        s->add_option("--alpha", o.alpha)->required();
        s->add_option("--beta", o.beta)->required();
        if (std::string(name) == "step-niht") s->add_option("--C", o.c_lin);
        add_common(s, false, false);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help(e.what() == std::string() ? "" : "");
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return kOk;
        }
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*solve) return cmd_solve(o);
        if (*sweep) return cmd_sweep(o);
        if (*rip) return cmd_rip(o);
        if (*jac) return cmd_check_jacobian(o);
        if (*cex) return cmd_counterexample(o);
        if (*bound) return cmd_bound(bound->get_subcommands().front()->get_name(), o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Diverged& e) {
        std::cerr << "diverged: " << e.what() << " at iteration " << e.iteration() << '\n';
        return kDiverged;
    }
    return kUsage;
}

}  // namespace nliht::cli
