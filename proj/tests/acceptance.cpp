// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "nliht/nliht.hpp"
#include "oracles.hpp"

using namespace nliht;

namespace {

std::vector<int> g_failed;

void report(int id, bool pass, double seconds, double limit, const std::string& detail) {
    const bool in_time = limit <= 0.0 || seconds < limit;
    const bool ok = pass && in_time;
    if (!ok) g_failed.push_back(id);
    if (limit > 0.0) {
        std::printf("[%s] criterion %2d: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(),
                    seconds, limit);
    } else {
        std::printf("[%s] criterion %2d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
    }
    std::fflush(stdout);
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

ProblemSpec gaussian_spec(Index n, Index m, Index k, std::uint64_t seed) {
    ProblemSpec s;
    s.n = n;
    s.m = m;
    s.k = k;
    s.seed = seed;
    return s;
}

double max_iterate_gap(const RecoveryResult& a, const RecoveryResult& b) {
    if (a.trace.size() != b.trace.size()) return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        gap = std::max(gap, (a.trace[i].iterate - b.trace[i].iterate).cwiseAbs().maxCoeff());
    }
    return gap;
}

// 1
void linear_reduction() {
    Stopwatch sw;
    double worst = 0.0;
    std::size_t iterates = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const Problem p = generate_problem(gaussian_spec(64, 32, 4, 1000 + i));
        const auto set = ConstraintSet::k_sparse(64, 4);
        SolverConfig cfg;
        cfg.mu = 1.0 / estimate_rip(p.model, set, 500, i).beta_hat;
        cfg.max_iterations = 500;
        cfg.record_trace = true;
        const auto lin = niht_solve(p.y, p.model, set, cfg);
        const auto id = niht_solve(p.y, MeasurementModel::composed(p.model.matrix(), Nonlinearity::identity()), set, cfg);
        worst = std::max(worst, max_iterate_gap(lin, id));
        iterates += lin.trace.size();
    }
    report(1, worst <= 1e-12, sw.seconds(), 5,
           format("identity nonlinearity vs linear IHT, 20 instances, %zu iterates, max coordinate gap %.3g <= 1e-12",
                  iterates, worst));
}

SweepSpec recovery_sweep() {
    SweepSpec s;
    s.base = gaussian_spec(256, 128, 8, 0);
    s.ms = {128};
    s.ks = {8};
    s.scales = {0.0};
    s.trials_per_cell = 50;
    s.base_seed = 20240601;
    s.settings.solver.max_iterations = 500;
    s.settings.success_threshold = 1e-6;
    s.jobs = std::max(1u, std::thread::hardware_concurrency());
    return s;
}

// 2 and 11
void linear_recovery_and_determinism() {
    Stopwatch sw;
    SweepSpec s = recovery_sweep();
    const std::string first = sweep_csv(run_sweep(s));
    const auto rows = run_sweep(s);
    const double t2 = sw.seconds() / 2.0;
    const double rate = rows.front().success_rate;
    report(2, rate >= 0.95, t2, 30,
           format("linear N=256 M=128 k=8, 50 trials, mu=1/beta_hat: success rate %.2f >= 0.95 "
                  "(rel err < 1e-6 within 500 iterations, mean %.1f iterations)",
                  rate, rows.front().mean_iters));

    Stopwatch sw11;
    s.jobs = 1;
    const std::string serial = sweep_csv(run_sweep(s));
    const std::string again = sweep_csv(rows);
    const bool same = first == serial && first == again;
    report(11, same, sw11.seconds(), 0,
           format("criterion 2 sweep rerun with the same base seed (parallel and serial): CSV byte-identical = %s, "
                  "%zu bytes",
                  same ? "yes" : "no", first.size()));
}

struct ContractionTally {
    std::size_t runs = 0;
    std::size_t feasible_runs = 0;
    std::size_t iterations = 0;
    std::size_t violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();  // lhs - rhs
    double min_factor = std::numeric_limits<double>::infinity();
};

// ||x_A - x^{n+1}||^2 <= a' ||x_A - x^n||^2 + 1e-9 along a recorded trace.
void tally_contraction(const TrialRecord& r, ContractionTally& t) {
    const double factor = 2.0 * (1.0 / (r.mu_used * r.alpha_hat) - 1.0 + 4.0 * r.c_hat / r.alpha_hat);
    const auto window = admissible_step_niht(r.alpha_hat, r.beta_hat, r.c_hat);
    ++t.runs;
    if (window && window->contains(r.mu_used)) ++t.feasible_runs;
    t.min_factor = std::min(t.min_factor, factor);
    const auto& tr = r.result.trace;
    for (std::size_t n = 0; n + 1 < tr.size(); ++n) {
        const double now = *tr[n].target_distance, next = *tr[n + 1].target_distance;
        const double margin = next * next - (factor * now * now + 1e-9);
        ++t.iterations;
        if (margin > 0.0) ++t.violations;
        t.worst_margin = std::max(t.worst_margin, margin);
    }
}

std::vector<TrialRecord> traced_trials(const ProblemSpec& base, std::size_t count, std::uint64_t seed0,
                                       const TrialSettings& settings) {
    std::vector<TrialRecord> out(count);
    parallel_for(count, [&](std::size_t i) {
        ProblemSpec s = base;
        s.seed = derive_seed(seed0, i);
        out[i] = run_trial(s, settings);
    });
    return out;
}

// 3 and 5
void nonlinear_recovery_and_contraction() {
    Stopwatch sw;
    ProblemSpec base = gaussian_spec(256, 128, 8, 0);
    base.h_kind = NonlinearityKind::ScaledSine;
    base.h_scale = 0.05;
    TrialSettings ts;
    ts.solver.max_iterations = 500;
    ts.solver.record_trace = true;
    ts.success_threshold = 1e-3;
    ts.compute_bounds = true;
    const auto runs = traced_trials(base, 50, 777, ts);

    std::size_t successes = 0, within_bound = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
        if (!r.success) continue;
        ++successes;
        // With x0 in A and no noise, e_A = 0 and the bound reduces to ||x_A - x0|| = 0.
        const double excess = r.error - r.bounds->derived.bound;
        worst_excess = std::max(worst_excess, excess);
        if (excess <= 1e-6) ++within_bound;
    }
    const double rate = static_cast<double>(successes) / static_cast<double>(runs.size());
    report(3, rate >= 0.90 && within_bound == successes, sw.seconds(), 60,
           format("h=0.05 sin N=256 M=128 k=8, 50 trials: success rate %.2f >= 0.90 (rel err < 1e-3); "
                  "%zu/%zu successes within the e_A=0 derived bound + 1e-6 (max excess %.3g)",
                  rate, within_bound, successes, worst_excess));

    Stopwatch sw5;
    ContractionTally main_runs;
    for (const auto& r : runs) tally_contraction(r, main_runs);

    // The criterion 3 ensemble has beta_hat/alpha_hat near 2.4, so no run
    // admits a step size. A tall ensemble where the window is non-empty
    // exercises the inequality with a' < 1.
    ProblemSpec tall = gaussian_spec(64, 1024, 2, 0);
    tall.h_kind = NonlinearityKind::ScaledSine;
    tall.h_scale = 0.05;
    ContractionTally feasible_runs;
    for (const auto& r : traced_trials(tall, 20, 555, ts)) tally_contraction(r, feasible_runs);

    const bool pass = main_runs.violations == 0 && feasible_runs.violations == 0 && feasible_runs.feasible_runs > 0;
    report(5, pass, sw5.seconds(), 0,
           format("contraction with 2000-sample alpha_hat, C_hat: criterion 3 runs %zu/%zu feasible, "
                  "%zu violations in %zu iterations; N=64 M=1024 k=2 runs %zu/%zu feasible (min a'=%.3f), "
                  "%zu violations in %zu iterations (worst margin %.3g)",
                  main_runs.feasible_runs, main_runs.runs, main_runs.violations, main_runs.iterations,
                  feasible_runs.feasible_runs, feasible_runs.runs, feasible_runs.min_factor, feasible_runs.violations,
                  feasible_runs.iterations, feasible_runs.worst_margin));
}

// 4
void oracle_equivalence() {
    Stopwatch sw;
    ProblemSpec base = gaussian_spec(8, 6, 2, 0);
    base.h_kind = NonlinearityKind::ScaledSine;
    base.h_scale = 0.05;
    TrialSettings ts;
    ts.solver.max_iterations = 1000;
    std::size_t close = 0, dominated = 0, stalled = 0;
    double worst_below = 0.0;
    std::vector<double> ratios;
    for (std::uint64_t i = 0; i < 20; ++i) {
        ProblemSpec s = base;
        s.seed = 4000 + i;
        const Problem p = generate_problem(s);
        const TrialRecord r = run_trial_on(s, p, ts);
        const auto o = exhaustive_oracle(p.y, p.model, 2);
        if (std::abs(r.residual - o.residual) <= 1e-6) {
            ++close;
        } else if (r.stop_reason == "iterate_tol") {
            ++stalled;
        }
        if (o.residual <= r.residual + 1e-9) ++dominated;
        worst_below = std::max(worst_below, o.residual - r.residual);
        ratios.push_back(r.beta_hat / r.alpha_hat);
    }
    std::sort(ratios.begin(), ratios.end());
    report(4, close >= 18 && dominated == 20, sw.seconds(), 10,
           format("N=8 M=6 k=2 h=0.05 sin: residual within 1e-6 of the exhaustive oracle on %zu/20 (>= 18), "
                  "%zu others stopped on iterate change with residual above the oracle's, median beta_hat/alpha_hat %.1f; "
                  "oracle residual <= solver residual + 1e-9 on %zu/20 (max oracle excess %.3g)",
                  close, stalled, 0.5 * (ratios[9] + ratios[10]), dominated, worst_below));
}

// 6
void jacobian_validity() {
    Stopwatch sw;
    const Matrix phi = oracle::gaussian_matrix(10, 16, 66);
    const std::vector<std::pair<std::string, MeasurementModel>> models{
        {"linear", MeasurementModel::linear(phi)},
        {"identity", MeasurementModel::composed(phi, Nonlinearity::identity())},
        {"sine", MeasurementModel::composed(phi, Nonlinearity::sine(0.5))},
        {"tanh", MeasurementModel::composed(phi, Nonlinearity::tanh(0.5))},
        {"cubic", MeasurementModel::composed(phi, Nonlinearity::cubic(0.1, 1.5))}};
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    double worst = 0.0, weakest_control = std::numeric_limits<double>::infinity();
    for (const auto& [name, m] : models) {
        for (int t = 0; t < 10; ++t) {
            Vector x(16);
            for (Index i = 0; i < 16; ++i) x[i] = u(rng);
            worst = std::max(worst, fd_jacobian_check(m, x, 1e-6));
            const double control = fd_jacobian_check(
                [&](const Vector& z) { return forward(m, z); },
                [&](const Vector& p, const Vector& v) -> Vector { return 1.01 * jacobian_apply(m, p, v); }, x, 1e-6);
            weakest_control = std::min(weakest_control, control);
        }
    }
    report(6, worst < 1e-4 && weakest_control > 1e-3, sw.seconds(), 0,
           format("5 catalogue models x 10 points: max FD deviation %.3g < 1e-4; "
                  "corrupted (x1.01) Jacobian min deviation %.3g > 1e-3",
                  worst, weakest_control));
}

// 7
void bound_arithmetic() {
    Stopwatch sw;
    // a = 2/(mu alpha) - 2 = 0.5 at alpha = 1, mu = 0.8; residual 0.5 gives sqrt(eps) = 1.
    const auto t1 = theorem1_report(1.0, 0.8, std::vector<double>{0.5}, 1.0, 0.01, 0.0);
    const long k_ref = oracle::iterations_closed_form(0.01 * 1.0 / 1.0, 2.0 / 0.8 - 2.0);
    // c = 4(1 - mu alpha) = 0.5 at mu = 0.875; delta f / ||x_opt|| = 0.01 * 10 / 1.
    const auto t2 = theorem2_report(1.0, 0.875, 10.0, 1.0, 0.01);
    const long n_ref = oracle::iterations_closed_form(0.1, 4.0 * (1.0 - 0.875));
    const std::vector<double> ones{1, 1, 1};
    const auto e3 = theorem1_report(1.0, 0.8, ones, 1.0, 0.01, 0.0);
    const double eps_sum = oracle::epsilon_geometric(0.5, 4.0, 1.0, 3);
    const double eps_rec = oracle::epsilon_recursive(0.5, 4.0, ones);

    const bool pass = t1.k_star && *t1.k_star == 14 && k_ref == 14 && t2.n_star && *t2.n_star == 7 && n_ref == 7 &&
                      std::abs(e3.epsilon_k - 7.0) < 1e-12 && std::abs(eps_sum - 7.0) < 1e-12 &&
                      std::abs(eps_rec - 7.0) < 1e-12;
    report(7, pass, sw.seconds(), 0,
           format("k*=%s (reference %ld), n*=%s (reference %ld), eps^3=%.15g (closed form %.15g, recursion %.15g)",
                  fmt_count(t1.k_star).c_str(), k_ref, fmt_count(t2.n_star).c_str(), n_ref, e3.epsilon_k, eps_sum,
                  eps_rec));
}

// 8
void rscp_rip_identity() {
    Stopwatch sw;
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    const auto model = MeasurementModel::linear(d);
    const auto set = ConstraintSet::k_sparse(2, 1);
    Vector y(2);
    y << 0.7, -1.3;
    const auto obj = least_squares_objective(model, y);
    std::mt19937_64 rng(8);
    double worst = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int t = 0; t < 500; ++t) {
        const RipSample s = draw_rip_sample(set, rng);
        const double rip = rip_quotient(model, s), rscp = rscp_quotient(obj, s.x1, s.x2);
        worst = std::max(worst, std::abs(rip - rscp));
        lo = std::min(lo, rscp);
        hi = std::max(hi, rscp);
    }
    const auto est = estimate_rip(model, set, 500, 8);
    const bool pass = worst <= 1e-9 && std::abs(lo - 1.0) <= 1e-9 && std::abs(hi - 4.0) <= 1e-9 &&
                      std::abs(est.alpha_hat - 1.0) <= 1e-9 && std::abs(est.beta_hat - 4.0) <= 1e-9;
    report(8, pass, sw.seconds(), 0,
           format("diag(1,2), 500 shared pairs: max |rscp - rip| quotient %.3g <= 1e-9; rscp min %.12g max %.12g; "
                  "estimate_rip alpha_hat %.12g beta_hat %.12g",
                  worst, lo, hi, est.alpha_hat, est.beta_hat));
}

// 9
void pgd_niht_equivalence() {
    Stopwatch sw;
    double worst = 0.0;
    std::size_t iterates = 0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const Problem p = generate_problem(gaussian_spec(64, 32, 4, 9000 + i));
        const auto set = ConstraintSet::k_sparse(64, 4);
        SolverConfig cfg;
        cfg.mu = 1.0 / estimate_rip(p.model, set, 500, i).beta_hat;
        cfg.max_iterations = 500;
        cfg.record_trace = true;
        const auto a = niht_solve(p.y, p.model, set, cfg);
        const auto b = pgd_solve(least_squares_objective(p.model, p.y), set, cfg);
        worst = std::max(worst, max_iterate_gap(a, b));
        iterates += a.trace.size();
    }
    report(9, worst <= 1e-12, sw.seconds(), 0,
           format("PGD on ||y - Phi x||^2 vs linear IHT, 10 instances, %zu iterates: max coordinate gap %.3g <= 1e-12",
                  iterates, worst));
}

// 10
void nonconvexity_witness() {
    Stopwatch sw;
    const auto set = ConstraintSet::k_sparse(1, 1);
    const auto sine = MeasurementModel::composed(Matrix::Identity(1, 1), Nonlinearity::sine(0.5));
    const auto affine = MeasurementModel::composed(Matrix::Identity(1, 1), Nonlinearity::identity());
    const auto w = convexity_counterexample(sine, set, 10, 1000);
    const auto none = convexity_counterexample(affine, set, 10, 1000);
    const bool grid = oracle::scalar_sine_violation_exists(0.5);
    const bool confirmed = w.found && midpoint_convexity_gap(sine, w.y, w.x1, w.x2) < 0.0;
    report(10, confirmed && grid && !none.found, sw.seconds(), 0,
           format("h=0.5 sin: witness found after %zu trials (gap %.3g, grid search agrees: %s); "
                  "identity model: %s after %zu trials",
                  w.trials_used, w.gap, grid ? "yes" : "no", none.found ? "found" : "not found", none.trials_used));
}

}  // namespace

// --expect-fail 4,7 makes the exit status succeed only when exactly those
// criteria fail. The FAIL lines are printed regardless.
int main(int argc, char** argv) {
    std::vector<int> expected;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--expect-fail") continue;
        std::string list = argv[i + 1];
        for (std::size_t pos = 0; pos < list.size();) {
            const std::size_t comma = std::min(list.find(',', pos), list.size());
            expected.push_back(std::stoi(list.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    std::sort(expected.begin(), expected.end());
    Stopwatch total;
    linear_reduction();
    linear_recovery_and_determinism();
    nonlinear_recovery_and_contraction();
    oracle_equivalence();
    jacobian_validity();
    bound_arithmetic();
    rscp_rip_identity();
    pgd_niht_equivalence();
    nonconvexity_witness();
    std::sort(g_failed.begin(), g_failed.end());
    std::string failed, known;
    for (int id : g_failed) failed += (failed.empty() ? "" : ",") + std::to_string(id);
    for (int id : expected) known += (known.empty() ? "" : ",") + std::to_string(id);
    std::printf("%zu of 11 criteria failed [%s]; expected failures [%s]; %.1f s total\n", g_failed.size(),
                failed.c_str(), known.c_str(), total.seconds());
    return g_failed == expected ? 0 : 1;
}
