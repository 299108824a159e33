#include "doctest.h"

#include <cmath>

#include "generators.hpp"
#include "regime.hpp"
#include "streamrec/analysis.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/experiment.hpp"
#include "streamrec/stream_solver.hpp"

using namespace streamrec;

using testgen::draw_in_regime;
using testgen::InRegime;
using testgen::traced;

TEST_CASE("epsilon closed form") {
  CHECK(epsilon_bound(0.3, 0.0).epsilon == doctest::Approx(0.3));
  CHECK(epsilon_bound(0.0, 0.5).epsilon == doctest::Approx(0.5));
  const auto r = epsilon_bound(0.2, 0.3);
  CHECK(r.epsilon == doctest::Approx(0.6 - std::sqrt(0.07)).epsilon(1e-14));
  CHECK(std::abs(r.epsilon - 0.33542) <= 1e-5);
  CHECK(std::abs(r.sequence.back() - r.epsilon) <= 1e-12);
  for (std::size_t i = 1; i < r.sequence.size(); ++i) CHECK(r.sequence[i] >= r.sequence[i - 1]);
  CHECK_THROWS_AS(epsilon_bound(0.2, 0.41), OutOfRegime);
  CHECK_THROWS_AS(epsilon_bound(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_bound(0.2, -0.1), std::invalid_argument);
}

TEST_CASE("property: the recursion settles on the closed form") {
  int points = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double delta = 0.09 * i;
      // theta strictly inside the regime so the iteration converges geometrically
      const double theta = 0.5 * (1.0 - delta) * 0.095 * j;
      const auto r = epsilon_bound(delta, theta);
      REQUIRE(std::abs(r.sequence.back() - r.epsilon) <= 1e-12);
      REQUIRE(r.epsilon >= delta - 1e-15);
      REQUIRE(r.epsilon < 1.0);
      ++points;
    }
  CHECK(points == 100);
}

TEST_CASE("theorem constant") {
  CHECK(theorem_constant(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0) == doctest::Approx(9.24).epsilon(1e-3));
  CHECK(theorem_constant(0.0, 0.0, 0.0, 5.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(theorem_constant(0.0, 0.5, 0.5, 1.0), OutOfRegime);
  // rho for delta 0.2, theta 0.3
  const double eps = epsilon_bound(0.2, 0.3).epsilon;
  CHECK(0.3 / (1.0 - eps) == doctest::Approx(0.4514).epsilon(1e-3));
}

TEST_CASE("conditioning of a decoupled identity chain") {
  testgen::Instance inst;
  inst.n = 3;
  for (long k = 0; k < 4; ++k) {
    SampleBatch b;
    b.k = k;
    b.a = Matrix::identity(3, 2.0);
    b.b = Matrix(3, 3);
    b.values = {1.0, -1.0, 0.5};
    b.times.assign(3, 0.0);
    inst.batches.push_back(b);
    inst.lambdas.push_back(0.0);
  }
  const auto r = conditioning(traced(inst).trace());
  CHECK(r.kappa == doctest::Approx(4.0));
  CHECK(r.delta == doctest::Approx(0.0));
  CHECK(r.theta == 0.0);
  CHECK(r.epsilon == doctest::Approx(0.0));
  CHECK(r.regime);
  CHECK(r.rho == 0.0);
  const std::vector<std::size_t> lags{0, 1, 2};
  const auto env = theorem_envelope(r, lags);
  CHECK(env[0] > 0.0);
  CHECK(env[1] == 0.0);
  CHECK(env[2] == 0.0);
}

TEST_CASE("conditioning needs two batches") {
  testgen::Rng rng(1);
  const auto inst = testgen::random_instance(rng, 3, 1, 6, 6, 0.0);
  CHECK_THROWS_AS(conditioning(traced(inst).trace()), std::invalid_argument);
}

TEST_CASE("out-of-regime reports use the measured epsilon") {
  testgen::Rng rng(2);
  const auto inst = testgen::random_instance(rng, 4, 5, 6, 10, 1e-6);
  const auto r = conditioning(traced(inst).trace());
  CHECK_FALSE(r.regime);
  CHECK(r.epsilon == r.epsilon_measured);
  CHECK_THROWS_AS(theorem_envelope(r, std::vector<std::size_t>{1}), OutOfRegime);
}

TEST_CASE("property: report invariants") {
  testgen::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = draw_in_regime(rng);
    const auto& r = g.report;
    REQUIRE(r.delta >= 0.0);
    REQUIRE(r.theta >= 0.0);
    REQUIRE(r.epsilon < 1.0);
    REQUIRE(r.epsilon >= r.delta - 1e-15);
    REQUIRE(r.m_y > 0.0);
    REQUIRE(r.lambda_inv > 0.0);
  }
}

TEST_CASE("property: measured Schur complements stay within epsilon") {
  testgen::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = draw_in_regime(rng);
    for (const auto& q : g.solver.trace().q) {
      Matrix d = q;
      add_diagonal(d, -g.report.kappa);
      const auto range = eigen_range(d);
      const double dev = std::max(std::abs(range.min), std::abs(range.max)) / g.report.kappa;
      REQUIRE(dev <= g.report.epsilon + 1e-10);
    }
  }
}

TEST_CASE("property: lag errors stay under the envelope") {
  testgen::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = draw_in_regime(rng);
    const auto fin = g.solver.full_backward_sweep();
    for (const auto& [key, est] : g.solver.history().snapshots()) {
      const auto [k, K] = key;
      const double err = norm2(subtract(est, fin[static_cast<std::size_t>(k)]));
      const std::vector<std::size_t> lag{static_cast<std::size_t>(K - k)};
      REQUIRE(err <= theorem_envelope(g.report, lag)[0] + 1e-10);
    }
  }
}

TEST_CASE("lag tables") {
  testgen::Rng rng(6);
  SUBCASE("decoupled packets converge immediately") {
    auto inst = testgen::random_instance(rng, 4, 8, 8, 16, 1e-6);
    for (auto& b : inst.batches) b.b = Matrix(b.size(), 4);
    const StreamSolver s = traced(inst);
    const auto t = lag_table(s.history(), final_estimates(s), 1, 5, 1, 7);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      for (std::size_t j = 0; j < t.cols.size(); ++j) {
        if (t.rows[i] < t.cols[j]) {
          REQUIRE_FALSE(t.values[i][j].has_value());
          continue;
        }
        REQUIRE(t.values[i][j].has_value());
        REQUIRE((!std::isfinite(*t.values[i][j]) || *t.values[i][j] <= -14.0));
      }
  }
  SUBCASE("geometric decay on an in-regime instance") {
    testgen::Rng r2(7);
    InRegime g = draw_in_regime(r2);
    while (g.inst.batches.size() < 7 || g.report.rho < 0.05) g = draw_in_regime(r2);
    const StreamSolver& s = g.solver;
    const long last = s.last_index();
    const auto t = lag_table(s.history(), final_estimates(s), 0, last - 3, 0, last - 1);
    const auto sum = summarize_lags(t);
    CHECK(sum.slope <= std::log10(g.report.rho) + 0.2);
    const std::string text = format_lag_table(t);
    CHECK(text.find("\xe2\x80\x94") != std::string::npos);
    const std::string csv = lag_table_csv(t);
    CHECK(csv.rfind("K,0,", 0) == 0);
  }
}

TEST_CASE("conditioning csv layout") {
  testgen::Rng rng(8);
  const auto g = draw_in_regime(rng);
  const std::string csv = conditioning_csv(g.report);
  CHECK(csv.rfind("k,", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines >= g.report.blocks.size() + 1);
}

TEST_CASE("monte carlo sampling study") {
  const PacketBasis basis = build_lot(8, 0.25);
  SUBCASE("dense sampling concentrates near one") {
    const std::vector<double> grid{8000.0};
    const auto r = sampling_monte_carlo(basis, grid, 5, 0.05, 0.2, 1);
    const auto& pt = r.points[0];
    CHECK(std::abs(pt.lambda_min[1] - 1.0) <= 0.1);
    CHECK(std::abs(pt.lambda_max[1] - 1.0) <= 0.1);
    CHECK(pt.samples == static_cast<std::size_t>(std::lround(8000.0 * 2.5)));
  }
  SUBCASE("median delta and coupling shrink with the rate") {
    const std::vector<double> grid{64, 256, 1024, 4096};
    const auto r = sampling_monte_carlo(basis, grid, 20, 0.05, 0.2, 2);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
      CHECK(r.points[i].delta[1] < r.points[i - 1].delta[1]);
      CHECK(r.points[i].e_norm[1] < r.points[i - 1].e_norm[1]);
    }
    REQUIRE(r.required_m.has_value());
    CHECK(*r.required_m > 256.0);
    CHECK(r.points.front().success == 0.0);
    CHECK(r.points.back().success >= 0.85);
  }
  SUBCASE("seeded") {
    const std::vector<double> grid{64};
    const auto a = sampling_monte_carlo(basis, grid, 5, 0.05, 0.2, 9);
    const auto b = sampling_monte_carlo(basis, grid, 5, 0.05, 0.2, 9);
    CHECK(a.points[0].delta == b.points[0].delta);
  }
  CHECK_THROWS_AS(sampling_monte_carlo(basis, std::vector<double>{64}, 0, 0.05, 0.2, 1), std::invalid_argument);
}
