#include "lielab/experiment.hpp"
#include "lielab/report.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace lielab;
using namespace testing_support;

TEST(Fit, RecoversPowerLaws) {
  std::vector<std::pair<double, double>> rows;
  for (double e : {0.05, 0.1, 0.2, 0.4, 0.8}) rows.emplace_back(e, std::sqrt(e));
  EXPECT_NEAR(fit_exponent(rows).slope, 0.5, 1e-12);
  rows.clear();
  for (double e : {0.05, 0.1, 0.2, 0.4}) rows.emplace_back(e, 3 * e);
  const auto f = fit_exponent(rows);
  EXPECT_NEAR(f.slope, 1, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.residual, 0, 1e-12);
}

TEST(Fit, DropsRowsBelowFloorAndNeedsFour) {
  std::vector<std::pair<double, double>> rows{{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}, {0.4, 0.4}, {0.5, 0.0}};
  const auto f = fit_exponent(rows);
  EXPECT_EQ(f.used, 4u);
  EXPECT_NEAR(f.slope, 1, 1e-12);
  rows.resize(3);
  EXPECT_THROW(fit_exponent(rows), Error);
  EXPECT_THROW(fit_exponent({{0.5, 1}, {0.5, 2}, {0.5, 3}, {0.5, 4}}), Error);
}

TEST(EpsGrid, ParsesSpacings) {
  const auto lin = parse_eps_grid("0.25:1:4:lin");
  ASSERT_EQ(lin.size(), 4u);
  EXPECT_DOUBLE_EQ(lin[1], 0.5);
  const auto lg = parse_eps_grid("0.01:1:3");
  EXPECT_NEAR(lg[1], 0.1, 1e-15);
  for (const char* bad : {"0:1:4", "0.5:2:3", "0.5:0.25:3", "a:1:3", "0.1:1", "0.1:1:3:cubic"})
    EXPECT_THROW(parse_eps_grid(bad), Error) << bad;
}

TEST(Finish, AppliesSlackAndFailureBudget) {
  ExperimentConfig cfg;
  ExperimentResult r;
  r.theory = 1.0;
  for (double e : {0.1, 0.2, 0.4, 0.8}) r.rows.push_back({e, {}, {}, e * e, true, ""});
  detail::finish(r, cfg);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_NEAR(r.fit->slope, 2, 1e-12);

  ExperimentResult slow;
  slow.theory = 1.0;
  for (double e : {0.1, 0.2, 0.4, 0.8}) slow.rows.push_back({e, {}, {}, std::pow(e, 0.8), true, ""});
  detail::finish(slow, cfg);
  EXPECT_EQ(slow.verdict, Verdict::fail);

  ExperimentResult broken = r;
  broken.fit.reset();
  broken.rows[0].ok = broken.rows[1].ok = false;
  detail::finish(broken, cfg);
  EXPECT_EQ(broken.verdict, Verdict::unusable);

  ExperimentResult exact;
  for (double e : {0.1, 0.5}) exact.rows.push_back({e, {}, {}, 1e-8, true, ""});
  detail::finish(exact, cfg);
  EXPECT_EQ(exact.verdict, Verdict::pass);
}

TEST(Experiment, CsvHeaderAndRowOrder) {
  ExperimentResult r;
  r.mode = Mode::mitchell;
  r.rows.push_back({0.5, {0, 0}, {1, 2}, 0.25, true, ""});
  r.rows.push_back({0.25, {0, 0}, {1, 2}, 0.125, false, ""});
  const std::string csv = experiment_csv(r);
  EXPECT_EQ(csv,
            "mode,epsilon,p,q,err,slope,theory\n"
            "mitchell,0.25,0;0,1;2,nan,,inf\n"
            "mitchell,0.5,0;0,1;2,0.25,,inf\n");
}

TEST(Experiment, CarnotPansuDistancesDoNotMove) {
  ExperimentConfig cfg;
  cfg.eps_grid = parse_eps_grid("0.25:1:3:lin");
  cfg.pair_count = 2;
  cfg.solver.segments = 12;
  cfg.solver.starts = 3;
  const auto r = run_experiment(canned("carnot_heis"), cfg);
  EXPECT_FALSE(r.theory);
  EXPECT_EQ(r.verdict, Verdict::pass) << r.message;
}

TEST(Experiment, GronwallOnN522MatchesAlpha) {
  ExperimentConfig cfg;
  cfg.mode = Mode::gronwall;
  cfg.eps_grid = parse_eps_grid("0.0039:0.5:8:log");
  const auto r = run_experiment(canned("n522"), cfg);
  ASSERT_TRUE(r.fit);
  EXPECT_EQ(r.verdict, Verdict::pass) << r.message;
  EXPECT_NEAR(r.fit->slope, *r.theory, 0.1);
}

TEST(Experiment, DefaultPairsHaveExpectedShape) {
  const auto f = canned("n522");
  const Grading g = build_asymptotic_grading(f.tensor);
  const auto pairs = detail::default_pairs(g, 4, 3);
  ASSERT_EQ(pairs.size(), 4u);
  EXPECT_EQ(pairs[0].first, std::vector<double>(5, 0.0));
  EXPECT_NE(pairs[1].first, std::vector<double>(5, 0.0));
}

TEST(Report, JsonIsDeterministicAndComplete) {
  const auto f = canned("n522_x_n521");
  const std::string a = analysis_json(analyze(f, GradingSource::file), f).dump(2);
  const std::string b = analysis_json(analyze(f, GradingSource::file), f).dump(2);
  EXPECT_EQ(a, b);
  const auto j = Json::parse(a);
  for (const char* key : {"name", "dim", "step", "carnot", "asymptotic", "tangent", "expectations"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["asymptotic"]["beta"]["value"], 3);
}

TEST(Threads, EnvironmentCapsWorkerCount) {
  ::setenv("LIE_LAB_THREADS", "1", 1);
  EXPECT_EQ(worker_count(8), 1u);
  ::setenv("LIE_LAB_THREADS", "junk", 1);
  EXPECT_EQ(worker_count(3), 3u);
  ::unsetenv("LIE_LAB_THREADS");
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
