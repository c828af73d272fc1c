#pragma once

// Problem generation, the exhaustive support oracle, single trials and
// parameter sweeps with CSV output.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nliht/analysis.hpp"
#include "nliht/constraints.hpp"
#include "nliht/format.hpp"
#include "nliht/operators.hpp"
#include "nliht/solvers.hpp"

namespace nliht {

enum class Ensemble { Gaussian, Identity, Explicit };

inline std::string to_string(Ensemble e) {
    switch (e) {
        case Ensemble::Gaussian: return "gaussian";
        case Ensemble::Identity: return "identity";
        case Ensemble::Explicit: return "file";
    }
    return "unknown";
}

struct ProblemSpec {
    Index n = 1;
    Index m = 1;
    Index k = 1;
    Ensemble ensemble = Ensemble::Gaussian;
    std::optional<Matrix> explicit_matrix;
    NonlinearityKind h_kind = NonlinearityKind::Identity;
    double h_scale = 0.0;
    double h_radius = 1.0;  // cubic only
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1 || m < 1 || k < 1) throw InvalidInput("ProblemSpec: N, M, k must be >= 1");
        if (k > n) throw InvalidInput("ProblemSpec: k must be <= N");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
            throw InvalidInput("ProblemSpec: noise_sigma must be >= 0");
        }
        if (ensemble == Ensemble::Identity && m != n) throw InvalidInput("ProblemSpec: identity ensemble needs M == N");
        if (ensemble == Ensemble::Explicit) {
            if (!explicit_matrix) throw InvalidInput("ProblemSpec: explicit ensemble without a matrix");
            if (explicit_matrix->rows() != m || explicit_matrix->cols() != n) {
                throw InvalidInput("ProblemSpec: explicit matrix is not M x N");
            }
        }
    }

    Nonlinearity nonlinearity() const {
        if (h_kind == NonlinearityKind::Cubic) return Nonlinearity::cubic(h_scale, h_radius);
        return Nonlinearity::make(h_kind, h_scale);
    }
};

struct Problem {
    MeasurementModel model;
    Vector x0;
    Vector y;
    Vector noise;
    std::vector<Index> support;
};

/// Deterministic in spec.seed. Draw order: matrix (column-major), support,
/// coefficients, noise. The noise is sigma * z with z always drawn, so the
/// realised noise scales exactly with sigma.
inline Problem generate_problem(const ProblemSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix phi;
    switch (spec.ensemble) {
        case Ensemble::Gaussian: {
            phi.resize(spec.m, spec.n);
            const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
            for (Index j = 0; j < spec.n; ++j) {
                for (Index i = 0; i < spec.m; ++i) phi(i, j) = gauss(rng) * scale;
            }
            break;
        }
        case Ensemble::Identity: phi = Matrix::Identity(spec.m, spec.n); break;
        case Ensemble::Explicit: phi = *spec.explicit_matrix; break;
    }
    const Nonlinearity h = spec.nonlinearity();
    MeasurementModel model = spec.h_kind == NonlinearityKind::Identity
                                 ? MeasurementModel::linear(std::move(phi), spec.noise_sigma)
                                 : MeasurementModel::composed(std::move(phi), h, spec.noise_sigma);

    const Vector member = sample_member(ConstraintSet::k_sparse(spec.n, spec.k), rng);
    std::vector<Index> support;
    for (Index i = 0; i < spec.n; ++i) {
        if (member[i] != 0.0) support.push_back(i);
    }
    const Vector x0 = member / member.norm();

    Vector z(spec.m);
    for (Index i = 0; i < spec.m; ++i) z[i] = gauss(rng);
    Vector noise = spec.noise_sigma * z;
    Vector y = forward(model, x0) + noise;
    return Problem{std::move(model), x0, std::move(y), std::move(noise), std::move(support)};
}

/// Plain text: first line "M N", then M rows of N numbers.
inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open matrix file '" + path + "'");
    std::string line;
    int lineno = 0;
    Index m = 0, n = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream hdr(line);
        std::string extra;
        if (!(hdr >> m >> n) || (hdr >> extra) || m < 1 || n < 1) {
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected header 'M N'");
        }
        break;
    }
    if (m < 1) throw InvalidInput(path + ": empty matrix file");
    Matrix a(m, n);
    Index row = 0;
    while (row < m && std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        for (Index j = 0; j < n; ++j) {
            if (!(ls >> a(row, j))) {
                throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) +
                                   " numbers");
            }
        }
        std::string extra;
        if (ls >> extra) throw InvalidInput(path + ":" + std::to_string(lineno) + ": too many entries");
        ++row;
    }
    if (row < m) throw InvalidInput(path + ": expected " + std::to_string(m) + " rows, found " + std::to_string(row));
    if (!a.allFinite()) throw InvalidInput(path + ": non-finite entry");
    return a;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

struct OracleResult {
    Vector estimate;
    double residual = 0.0;
    std::vector<Index> support;
};

namespace detail {

inline Vector least_squares(const Matrix& a, const Vector& b) {
    return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(b);
}

inline Vector scatter(const std::vector<Index>& support, const Vector& coeffs, Index n) {
    Vector x = Vector::Zero(n);
    for (std::size_t j = 0; j < support.size(); ++j) x[support[j]] = coeffs[static_cast<Index>(j)];
    return x;
}

/// Gauss-Newton on the restricted coefficients, initialised at the restricted
/// linear least-squares solution; at most 50 outer iterations, step halving
/// (up to 30 times) whenever the residual would increase.
inline OracleResult restricted_solve(const Vector& y, const MeasurementModel& model,
                                     const std::vector<Index>& support) {
    const Index n = model.cols();
    const Index k = static_cast<Index>(support.size());
    Matrix sub(model.rows(), k);
    for (Index j = 0; j < k; ++j) sub.col(j) = model.matrix().col(support[static_cast<std::size_t>(j)]);
    Vector c = least_squares(sub, y);

    const auto residual_at = [&](const Vector& coeffs) -> double {
        try {
            return (y - forward(model, scatter(support, coeffs, n))).norm();
        } catch (const DomainViolation&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    double res = residual_at(c);
    if (!model.is_linear()) {
        for (int it = 0; it < 50 && std::isfinite(res); ++it) {
            const Vector x = scatter(support, c, n);
            const Vector r = y - forward(model, x);
            Matrix jac = sub;
            for (Index j = 0; j < k; ++j) jac.col(j) *= 1.0 + model.nonlinearity().derivative(c[j]);
            const Vector delta = least_squares(jac, r);
            double t = 1.0;
            bool improved = false;
            for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
                const Vector trial = c + t * delta;
                const double trial_res = residual_at(trial);
                if (trial_res <= res) {
                    improved = trial_res < res;
                    c = trial;
                    res = trial_res;
                    break;
                }
            }
            if (!improved || delta.norm() <= 1e-15 * (1.0 + c.norm())) break;
        }
    }
    return OracleResult{scatter(support, c, n), res, support};
}

}  // namespace detail

/// Best k-sparse fit over every support: closed-form least squares for linear
/// models, restricted Gauss-Newton otherwise. Requires C(N, k) <= 1e5.
inline OracleResult exhaustive_oracle(const Vector& y, const MeasurementModel& model, Index k) {
    require_size(y, model.rows(), "exhaustive_oracle y");
    const Index n = model.cols();
    if (k < 1 || k > n) throw InvalidInput("exhaustive_oracle: require 1 <= k <= N");
    if (binomial(n, k) > 1e5) throw InvalidInput("exhaustive_oracle: C(N, k) exceeds 1e5");
    OracleResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for_each_support(n, k, [&](const std::vector<Index>& support) {
        OracleResult r = detail::restricted_solve(y, model, support);
        if (r.residual < best.residual) best = std::move(r);
    });
    return best;
}

// ---------------------------------------------------------------------------
// Trials

enum class Algorithm { Niht, Pgd };

struct TrialSettings {
    Algorithm algorithm = Algorithm::Niht;
    std::optional<double> mu;  // nullopt: mu = 1 / beta_hat
    bool check_admissible = true;  // only consulted for an explicit mu
    SolverConfig solver;
    std::size_t rip_trials = 2000;
    std::size_t c_trials = 2000;
    double success_threshold = 1e-4;
    bool compute_bounds = false;
};

struct TrialRecord {
    ProblemSpec spec;
    double error = 0.0;
    double rel_error = 0.0;
    bool success = false;
    std::size_t iterations = 0;
    std::string stop_reason;
    double residual = 0.0;
    double wall_seconds = 0.0;
    double mu_used = 0.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double c_hat = 0.0;
    bool skipped = false;
    std::string skip_reason;
    bool diverged = false;
    std::optional<Corollary1Report> bounds;
    Vector estimate;
    RecoveryResult result;
};

struct ProblemConstants {
    RipEstimate rip;
    CEstimate c;
};

inline ProblemConstants estimate_constants(const Problem& p, const ConstraintSet& set, const TrialSettings& s,
                                           std::uint64_t seed) {
    return {estimate_rip(p.model, set, s.rip_trials, derive_seed(seed, 1)),
            estimate_C(p.model, set, s.c_trials, derive_seed(seed, 2))};
}

/// Runs one recovery on an already generated problem.
inline TrialRecord run_trial_on(const ProblemSpec& spec, const Problem& p, const TrialSettings& settings) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConstraintSet set = ConstraintSet::k_sparse(spec.n, spec.k);
    TrialRecord rec;
    rec.spec = spec;
    const ProblemConstants k = estimate_constants(p, set, settings, spec.seed);
    rec.alpha_hat = k.rip.alpha_hat;
    rec.beta_hat = k.rip.beta_hat;
    rec.c_hat = k.c.empirical;
    rec.mu_used = settings.mu.value_or(1.0 / rec.beta_hat);

    if (settings.mu && settings.check_admissible) {
        const auto window = settings.algorithm == Algorithm::Niht
                                ? admissible_step_niht(rec.alpha_hat, rec.beta_hat, rec.c_hat)
                                : admissible_step_pgd(rec.alpha_hat, rec.beta_hat);
        if (!window || !window->contains(rec.mu_used)) {
            rec.skipped = true;
            rec.skip_reason = std::string("infeasible step: ") +
                              (settings.algorithm == Algorithm::Niht ? kNihtStepCondition : kPgdStepCondition);
            rec.stop_reason = "skipped";
            return rec;
        }
    }

    SolverConfig cfg = settings.solver;
    cfg.mu = rec.mu_used;
    try {
        if (settings.algorithm == Algorithm::Niht) {
            rec.result = niht_solve(p.y, p.model, set, cfg, p.x0);
        } else {
            rec.result = pgd_solve(least_squares_objective(p.model, p.y), set, cfg);
        }
        rec.estimate = rec.result.estimate;
        rec.iterations = rec.result.iterations_run;
        rec.stop_reason = to_string(rec.result.stop_reason);
    } catch (const Diverged& d) {
        rec.diverged = true;
        rec.estimate = d.last_finite();
        rec.iterations = d.iteration();
        rec.stop_reason = "diverged";
    }
    rec.error = (rec.estimate - p.x0).norm();
    rec.rel_error = rec.error / p.x0.norm();
    rec.success = !rec.diverged && rec.rel_error < settings.success_threshold;
    rec.residual = (p.y - forward(p.model, rec.estimate)).norm();
    if (settings.compute_bounds) {
        const Vector x_a = project(p.x0, set);
        const double e_a = (p.y - forward(p.model, x_a)).norm();
        rec.bounds = corollary1_report(rec.alpha_hat, rec.mu_used, rec.c_hat, e_a, (p.x0 - x_a).norm());
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline TrialRecord run_trial(const ProblemSpec& spec, const TrialSettings& settings) {
    return run_trial_on(spec, generate_problem(spec), settings);
}

inline const std::vector<std::string>& trial_csv_columns() {
    static const std::vector<std::string> cols{
        "N",         "M",         "k",        "h_kind",     "h_scale",    "noise_sigma", "seed",
        "mu_used",   "alpha_hat", "beta_hat", "C_hat",      "error",      "rel_error",   "success",
        "iterations", "stop_reason", "residual", "cor1_printed_bound", "cor1_derived_bound", "skip_reason"};
    return cols;
}

inline std::string trial_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    const auto& s = r.spec;
    os << s.n << ',' << s.m << ',' << s.k << ',' << to_string(s.h_kind) << ',' << fmt_double(s.h_scale) << ','
       << fmt_double(s.noise_sigma) << ',' << s.seed << ',' << fmt_double(r.mu_used) << ','
       << fmt_double(r.alpha_hat) << ',' << fmt_double(r.beta_hat) << ',' << fmt_double(r.c_hat) << ',';
    if (r.skipped) {
        os << ",,,,,,,," << r.skip_reason;
    } else {
        os << fmt_double(r.error) << ',' << fmt_double(r.rel_error) << ',' << (r.success ? 1 : 0) << ','
           << r.iterations << ',' << r.stop_reason << ',' << fmt_double(r.residual) << ','
           << (r.bounds ? fmt_double(r.bounds->printed.bound) : "") << ','
           << (r.bounds ? fmt_double(r.bounds->derived.bound) : "") << ',';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
    ProblemSpec base;
    std::vector<Index> ms;
    std::vector<Index> ks;
    std::vector<double> scales;
    std::size_t trials_per_cell = 1;
    std::uint64_t base_seed = 0;
    TrialSettings settings;
    unsigned jobs = 1;
};

struct CellAggregate {
    std::size_t cell_id = 0;
    Index n = 0, m = 0, k = 0;
    NonlinearityKind h_kind = NonlinearityKind::Identity;
    double h_scale = 0.0;
    double noise_sigma = 0.0;
    std::size_t trials = 0;
    double success_rate = 0.0;
    double mean_rel_err = 0.0;
    double mean_iters = 0.0;
    double mu_used = 0.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double c_hat = 0.0;
    bool skipped = false;
    std::string skip_reason;
};

/// Seed of trial `trial` in cell `cell`.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t cell, std::size_t trial) {
    return derive_seed(base_seed, cell, trial);
}

/// Problem spec of every cell, in output order (M outermost, scale innermost).
inline std::vector<ProblemSpec> sweep_cells(const SweepSpec& sweep) {
    if (sweep.ms.empty() || sweep.ks.empty() || sweep.scales.empty()) throw InvalidInput("run_sweep: empty grid");
    std::vector<ProblemSpec> cells;
    for (Index m : sweep.ms) {
        for (Index k : sweep.ks) {
            for (double s : sweep.scales) {
                ProblemSpec c = sweep.base;
                c.m = m;
                c.k = k;
                c.h_scale = s;
                if (c.h_kind == NonlinearityKind::Identity && s != 0.0) c.h_kind = NonlinearityKind::ScaledSine;
                cells.push_back(c);
            }
        }
    }
    return cells;
}

namespace detail {

inline CellAggregate cell_header(const SweepSpec& sweep, std::size_t cell_id, const ProblemSpec& cell) {
    CellAggregate agg;
    agg.cell_id = cell_id;
    agg.n = cell.n;
    agg.m = cell.m;
    agg.k = cell.k;
    agg.h_kind = cell.h_kind;
    agg.h_scale = cell.h_scale;
    agg.noise_sigma = cell.noise_sigma;
    agg.trials = sweep.trials_per_cell;
    return agg;
}

inline std::optional<std::string> cell_invalid(const ProblemSpec& cell) {
    try {
        cell.validate();
        (void)cell.nonlinearity();
    } catch (const InvalidInput& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

inline void aggregate(CellAggregate& agg, const std::vector<TrialRecord>& records) {
    for (const auto& r : records) {
        if (r.skipped) {
            agg.skipped = true;
            agg.skip_reason = r.skip_reason;
        }
        agg.success_rate += r.success ? 1.0 : 0.0;
        agg.mean_rel_err += r.rel_error;
        agg.mean_iters += static_cast<double>(r.iterations);
        agg.mu_used += r.mu_used;
        agg.alpha_hat += r.alpha_hat;
        agg.beta_hat += r.beta_hat;
        agg.c_hat += r.c_hat;
    }
    const double t = static_cast<double>(records.size());
    if (t > 0) {
        agg.success_rate /= t;
        agg.mean_rel_err /= t;
        agg.mean_iters /= t;
        agg.mu_used /= t;
        agg.alpha_hat /= t;
        agg.beta_hat /= t;
        agg.c_hat /= t;
    }
}

inline TrialRecord run_cell_trial(const SweepSpec& sweep, std::size_t cell_id, const ProblemSpec& cell,
                                  std::size_t trial) {
    ProblemSpec spec = cell;
    spec.seed = trial_seed(sweep.base_seed, cell_id, trial);
    return run_trial(spec, sweep.settings);
}

}  // namespace detail

/// Replays a single cell serially. Gives the same row as run_sweep.
inline CellAggregate run_cell(const SweepSpec& sweep, std::size_t cell_id, const ProblemSpec& cell,
                              std::vector<TrialRecord>* records = nullptr) {
    CellAggregate agg = detail::cell_header(sweep, cell_id, cell);
    if (auto bad = detail::cell_invalid(cell)) {
        agg.skipped = true;
        agg.skip_reason = *bad;
        return agg;
    }
    std::vector<TrialRecord> local;
    for (std::size_t t = 0; t < sweep.trials_per_cell; ++t) local.push_back(detail::run_cell_trial(sweep, cell_id, cell, t));
    detail::aggregate(agg, local);
    if (records) *records = std::move(local);
    return agg;
}

/// One aggregate row per cell, in deterministic cell order regardless of
/// `jobs`. Trials are distributed over the workers individually. Cells whose
/// spec is invalid or whose explicit step size is inadmissible are marked
/// skipped rather than aborting the sweep.
inline std::vector<CellAggregate> run_sweep(const SweepSpec& sweep) {
    if (sweep.trials_per_cell < 1) throw InvalidInput("run_sweep: trials_per_cell must be >= 1");
    const std::vector<ProblemSpec> cells = sweep_cells(sweep);
    std::vector<std::optional<std::string>> invalid(cells.size());
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        invalid[c] = detail::cell_invalid(cells[c]);
        if (invalid[c]) continue;
        for (std::size_t t = 0; t < sweep.trials_per_cell; ++t) tasks.emplace_back(c, t);
    }
    std::vector<TrialRecord> records(tasks.size());
    const unsigned jobs =
        std::max(1u, std::min<unsigned>(sweep.jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1))));
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            records[i] = detail::run_cell_trial(sweep, tasks[i].first, cells[tasks[i].first], tasks[i].second);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    std::vector<CellAggregate> out;
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellAggregate agg = detail::cell_header(sweep, c, cells[c]);
        if (invalid[c]) {
            agg.skipped = true;
            agg.skip_reason = *invalid[c];
        } else {
            std::vector<TrialRecord> cell_records(std::make_move_iterator(records.begin() + cursor),
                                                  std::make_move_iterator(records.begin() + cursor +
                                                                          sweep.trials_per_cell));
            cursor += sweep.trials_per_cell;
            detail::aggregate(agg, cell_records);
        }
        out.push_back(std::move(agg));
    }
    return out;
}

inline constexpr const char* kSweepCsvHeader =
    "cell_id,N,M,k,h_kind,h_scale,noise_sigma,trials,success_rate,mean_rel_err,mean_iters,mu_used,alpha_hat,"
    "beta_hat,C_hat,skip_reason";

inline std::string sweep_csv(const std::vector<CellAggregate>& rows) {
    std::ostringstream os;
    os << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.cell_id << ',' << r.n << ',' << r.m << ',' << r.k << ',' << to_string(r.h_kind) << ','
           << fmt_double(r.h_scale) << ',' << fmt_double(r.noise_sigma) << ',' << r.trials << ',';
        if (r.skipped) {
            std::string reason = r.skip_reason;
            for (char& ch : reason) {
                if (ch == ',' || ch == '\n') ch = ';';
            }
            os << ",,,,,,," << reason << '\n';
        } else {
            os << fmt_double(r.success_rate) << ',' << fmt_double(r.mean_rel_err) << ',' << fmt_double(r.mean_iters)
               << ',' << fmt_double(r.mu_used) << ',' << fmt_double(r.alpha_hat) << ',' << fmt_double(r.beta_hat)
               << ',' << fmt_double(r.c_hat) << ",\n";
        }
    }
    return os.str();
}

}  // namespace nliht
