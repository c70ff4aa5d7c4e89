#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "bbpl/eval.hpp"
#include "bbpl/exact.hpp"
#include "bbpl/synth.hpp"

using namespace bbpl;

namespace {

LearnConfig config(double alpha, double grad_tol, std::size_t max_iters) {
  LearnConfig cfg;
  cfg.step.alpha = alpha;
  cfg.grad_tol = grad_tol;
  cfg.max_outer_iters = max_iters;
  cfg.bp.tol_msg = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("Lyapunov constants") {
  const auto p = lyapunov_params(LyapunovConfig{1.0, 2.0, 0.5});
  CHECK(p.gamma == doctest::Approx(0.25));
  CHECK(p.alpha_max == doctest::Approx(1.0 / 22));
  CHECK(p.delta(1.0, 0.04) == doctest::Approx(0.02));

  const auto q = lyapunov_params(LyapunovConfig{1.0, 1.0, 0.5});
  CHECK(q.gamma == doctest::Approx(1.0));
  CHECK(q.alpha_max == doctest::Approx(0.125));

  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{2.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{0.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{1.0, 1e-160, 1.0 - 1e-16}), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_params(LyapunovConfig{1e-300, 1e-300, 0.5}), std::domain_error);
}

TEST_CASE("property: alpha_max stays below both bounds") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double beta = scale(rng);
    const double eta = beta * (1.0 + scale(rng));
    const double c = u(rng);
    const auto p = lyapunov_params(LyapunovConfig{beta, eta, c});
    CHECK(p.alpha_max > 0.0);
    CHECK(p.alpha_max <= 2.0 / (eta + beta) + 1e-15);
    CHECK(p.alpha_max <= c * beta / (2 * eta * eta + eta * beta + beta * beta) + 1e-15);
    CHECK(p.gamma > 0.0);
  }
}

TEST_CASE("distance trace") {
  const auto g = gen_grid(2, 2);
  const auto w = banded_marginals(g, gen_true_params(g, 1.0, 4)).values();
  auto cfg = config(1.0, 1e-8, 100000);
  cfg.record_theta = true;
  const auto tr = train_full_bp(g, w, CountingNumbers::uniform_convex(g), cfg);
  REQUIRE(tr.converged);
  const auto d = distance_trace(tr, tr.theta);
  REQUIRE(d.size() == tr.iterations.size());
  CHECK(d.back() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.front() == doctest::Approx(l2_norm(tr.theta)));
  LearningTrace empty;
  CHECK_THROWS_AS(distance_trace(empty, tr.theta), std::invalid_argument);
  CHECK(l2_distance(std::vector<double>{0, 3}, std::vector<double>{4, 0}) == 5.0);
  CHECK_THROWS_AS(l2_distance(std::vector<double>{0}, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST_CASE("contraction ratios with a whole-graph block") {
  const auto g = gen_grid(2, 3);
  const auto w = banded_marginals(g, gen_true_params(g, 1.0, 2)).values();
  const auto run = contraction_ratios(g, w, CountingNumbers::uniform_convex(g), index_partition(g, 1),
                                      config(0.5, 1e-6, 50));
  REQUIRE(run.ratios.size() == run.trace.iterations.size());
  for (const auto& r : run.ratios) {
    if (r) CHECK(*r < 1e-6);
  }
  CHECK(run.defined() > 0);
  CHECK(run.fraction_below_one() == 1.0);
  ContractionRun none;
  CHECK(std::isnan(none.fraction_below_one()));
}

TEST_CASE("contraction ratios with two blocks are recorded per iteration") {
  const auto g = gen_grid(3, 3);
  const auto w = banded_marginals(g, gen_true_params(g, 1.0, 6)).values();
  const auto run = contraction_ratios(g, w, CountingNumbers::uniform_convex(g), index_partition(g, 2),
                                      config(0.5, 1e-6, 40));
  CHECK(run.ratios.size() == run.trace.iterations.size());
  CHECK(run.defined() > 0);
  for (const auto& r : run.ratios) {
    if (r) CHECK(*r >= 0.0);
  }
}

TEST_CASE("work report and trace CSV") {
  LearningTrace a;
  a.method = "full";
  a.converged = true;
  for (std::size_t t = 0; t < 3; ++t) {
    IterationRecord r;
    r.t = t;
    r.objective = 1.0 / (t + 1);
    r.grad_inf_norm = 0.1 / (t + 1);
    r.msg_updates = 10;
    r.msg_updates_cum = 10 * (t + 1);
    r.wall_ms = 0.5 * t;
    a.iterations.push_back(r);
  }
  LearningTrace b;
  b.method = "bbpl";
  const auto rows = work_report({a, b});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].outer_iters == 3);
  CHECK(rows[0].msg_updates == 30);
  CHECK(rows[0].converged);
  CHECK(rows[1].outer_iters == 0);
  CHECK(rows[1].msg_updates == 0);

  std::ostringstream report;
  write_work_report_csv(report, rows);
  CHECK(report.str().rfind("method,outer_iters,msg_updates,", 0) == 0);

  std::ostringstream os;
  const std::vector<double> dist{3.0, 2.0, 1.0};
  const std::vector<std::optional<double>> ratios{std::nullopt, 0.5, 0.25};
  write_trace_csv(os, a, dist, ratios);
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "t,method,objective,grad_inf_norm,msg_updates_cum,wall_ms,dist_to_opt,block_id,contraction_ratio");
  std::getline(lines, line);
  CHECK(line == "0,full,1,0.10000000000000001,10,0,3,,");
  std::getline(lines, line);
  CHECK(line.substr(line.size() - 4) == ",0.5");
}
