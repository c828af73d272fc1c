#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nliht/harness.hpp"
#include "oracles.hpp"

using namespace nliht;

namespace {

ProblemSpec small_spec(std::uint64_t seed = 7) {
    ProblemSpec s;
    s.n = 8;
    s.m = 6;
    s.k = 2;
    s.seed = seed;
    return s;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST(Generate, UnitNormKSparse) {
    const Problem p = generate_problem(small_spec());
    EXPECT_NEAR(p.x0.norm(), 1.0, 1e-12);
    EXPECT_EQ((p.x0.array() != 0).count(), 2);
    EXPECT_EQ(p.support.size(), 2u);
    EXPECT_EQ(p.y, forward(p.model, p.x0));
    EXPECT_TRUE(p.model.is_linear());
}

TEST(Generate, Deterministic) {
    ProblemSpec s = small_spec(3);
    s.h_kind = NonlinearityKind::ScaledSine;
    s.h_scale = 0.1;
    s.noise_sigma = 0.01;
    const Problem a = generate_problem(s), b = generate_problem(s);
    EXPECT_EQ(a.model.matrix(), b.model.matrix());
    EXPECT_EQ(a.x0, b.x0);
    EXPECT_EQ(a.y, b.y);
    EXPECT_FALSE(a.model.is_linear());
}

TEST(Generate, NoiseScalesExactly) {
    ProblemSpec s = small_spec(5);
    s.noise_sigma = 0.01;
    const Problem a = generate_problem(s);
    s.noise_sigma = 0.02;
    const Problem b = generate_problem(s);
    EXPECT_EQ(a.x0, b.x0);
    EXPECT_EQ(2.0 * a.noise.norm(), b.noise.norm());
    EXPECT_LT((a.y - forward(a.model, a.x0) - a.noise).norm(), 1e-15);
}

TEST(Generate, IdentityEnsembleAndValidation) {
    ProblemSpec s = small_spec();
    s.m = 8;
    s.ensemble = Ensemble::Identity;
    EXPECT_EQ(generate_problem(s).model.matrix(), Matrix::Identity(8, 8));
    s.m = 6;
    EXPECT_THROW(generate_problem(s), InvalidInput);
    s = small_spec();
    s.k = 9;
    EXPECT_THROW(generate_problem(s), InvalidInput);
}

TEST(MatrixFile, ReadsAndRejects) {
    const auto good = temp_file("nliht_good.txt", "2 3\n1 2 3\n4 5 6\n");
    const Matrix m = read_matrix_file(good.string());
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m(1, 2), 6.0);
    const auto bad = temp_file("nliht_bad.txt", "2 3\n1 2 3\n4 x 6\n");
    try {
        read_matrix_file(bad.string());
        FAIL();
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(read_matrix_file("/nonexistent/matrix.txt"), InvalidInput);
    EXPECT_THROW(read_matrix_file(temp_file("nliht_short.txt", "2 2\n1 2\n").string()), InvalidInput);
}

TEST(Oracle, RecoversLinearSignal) {
    const Problem p = generate_problem(small_spec(11));
    const auto o = exhaustive_oracle(p.y, p.model, 2);
    EXPECT_LT((o.estimate - p.x0).norm(), 1e-10);
    EXPECT_LT(o.residual, 1e-10);
}

TEST(Oracle, FullSupportIsNoWorse) {
    const Problem p = generate_problem(small_spec(12));
    std::mt19937_64 rng(1);
    const Vector y = oracle::gaussian_vector(6, rng);
    const auto full = exhaustive_oracle(y, p.model, 8);
    EXPECT_LE(full.residual, exhaustive_oracle(y, p.model, 2).residual + 1e-12);
    EXPECT_THROW(exhaustive_oracle(y, MeasurementModel::linear(Matrix::Identity(40, 40)), 20), InvalidInput);
}

TEST(Oracle, DominatesSolverOnNonlinearModel) {
    ProblemSpec s;
    s.n = 6;
    s.m = 5;
    s.k = 1;
    s.h_kind = NonlinearityKind::ScaledSine;
    s.h_scale = 0.1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        s.seed = seed;
        const Problem p = generate_problem(s);
        TrialSettings ts;
        ts.solver.max_iterations = 500;
        const TrialRecord r = run_trial_on(s, p, ts);
        EXPECT_LE(exhaustive_oracle(p.y, p.model, 1).residual, r.residual + 1e-9);
    }
}

TEST(Trial, SkipsInadmissibleExplicitStep) {
    TrialSettings ts;
    ts.mu = 5.0;
    const TrialRecord r = run_trial(small_spec(), ts);
    EXPECT_TRUE(r.skipped);
    EXPECT_NE(r.skip_reason.find(kNihtStepCondition), std::string::npos);
    ts.check_admissible = false;
    ts.mu = 0.5;
    EXPECT_FALSE(run_trial(small_spec(), ts).skipped);
}

TEST(Trial, CsvRowHasOneFieldPerColumn) {
    TrialSettings ts;
    ts.compute_bounds = true;
    ProblemSpec spec = small_spec();
    spec.n = 64;
    spec.m = 32;
    spec.k = 4;
    const TrialRecord r = run_trial(spec, ts);
    const std::string row = trial_csv_row(r);
    EXPECT_EQ(static_cast<std::size_t>(std::count(row.begin(), row.end(), ',')) + 1, trial_csv_columns().size());
    ASSERT_TRUE(r.bounds);
    EXPECT_TRUE(r.success);
}

namespace {

SweepSpec small_sweep() {
    SweepSpec s;
    s.base = small_spec();
    s.base.n = 16;
    s.ms = {8, 12};
    s.ks = {1, 2};
    s.scales = {0.0, 0.05};
    s.trials_per_cell = 3;
    s.base_seed = 42;
    s.settings.rip_trials = 200;
    s.settings.c_trials = 200;
    return s;
}

}  // namespace

TEST(Sweep, RowPerCellAndHeader) {
    SweepSpec s = small_sweep();
    s.ms = {8};
    s.ks = {2};
    s.scales = {0.0};
    s.trials_per_cell = 1;
    const auto rows = run_sweep(s);
    ASSERT_EQ(rows.size(), 1u);
    const std::string csv = sweep_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "cell_id,N,M,k,h_kind,h_scale,noise_sigma,trials,success_rate,mean_rel_err,mean_iters,mu_used,"
              "alpha_hat,beta_hat,C_hat,skip_reason");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Sweep, ByteIdenticalAcrossRunsAndJobCounts) {
    SweepSpec s = small_sweep();
    const std::string a = sweep_csv(run_sweep(s));
    s.jobs = 4;
    const std::string b = sweep_csv(run_sweep(s));
    EXPECT_EQ(a, b);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 9);
}

TEST(Sweep, SingleCellReplayMatches) {
    SweepSpec s = small_sweep();
    s.jobs = 3;
    const auto rows = run_sweep(s);
    const auto cells = sweep_cells(s);
    for (std::size_t c : {std::size_t{0}, std::size_t{5}}) {
        EXPECT_EQ(sweep_csv({run_cell(s, c, cells[c])}), sweep_csv({rows[c]}));
    }
    SweepSpec other = s;
    other.base_seed = 43;
    EXPECT_NE(sweep_csv(run_sweep(other)), sweep_csv(rows));
}

TEST(Sweep, InfeasibleCellIsSkippedNotAborted) {
    SweepSpec s = small_sweep();
    s.ms = {8};
    s.ks = {1, 20};
    s.scales = {0.0};
    s.settings.mu = 0.9;
    const auto rows = run_sweep(s);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].skipped);
    EXPECT_NE(rows[0].skip_reason.find("infeasible"), std::string::npos);
    EXPECT_TRUE(rows[1].skipped);  // k > N
    EXPECT_THROW(run_sweep(SweepSpec{}), InvalidInput);
}

TEST(Sweep, SuccessDecreasesWithSparsity) {
    SweepSpec s;
    s.base.n = 64;
    s.base.m = 48;
    s.ms = {48};
    for (Index k = 2; k <= 20; k += 2) s.ks.push_back(k);
    s.scales = {0.0};
    s.trials_per_cell = 50;
    s.base_seed = 2024;
    s.settings.rip_trials = 300;
    s.settings.c_trials = 1;
    s.settings.solver.max_iterations = 300;
    s.jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto rows = run_sweep(s);
    std::vector<double> k, rate;
    for (const auto& r : rows) {
        k.push_back(static_cast<double>(r.k));
        rate.push_back(r.success_rate);
    }
    const double rho = oracle::spearman(k, rate);
    EXPECT_LE(rho, 0.0);
    EXPECT_LT(oracle::spearman_permutation_p(k, rate, 2000, 1), 0.05) << "rho=" << rho;
}
