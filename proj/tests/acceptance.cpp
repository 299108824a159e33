// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "regime.hpp"
#include "streamrec/analysis.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/experiment.hpp"
#include "streamrec/oracle.hpp"
#include "streamrec/stream_solver.hpp"

using namespace streamrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const ExperimentResult& experiment(const std::string& name) {
  static std::map<std::string, ExperimentResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_experiment(preset_config(name))).first;
  return it->second;
}

Outcome oracle_equivalence() {
  testgen::Rng rng(20240601);
  double worst = 0.0;
  const std::size_t sizes[3] = {4, 8, 16};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = sizes[testgen::pick(rng, 0, 2)];
    const std::size_t packets = testgen::pick(rng, 1, 9);
    const double lambda = testgen::pick(rng, 0, 1) ? 1e-6 : 0.0;
    const auto inst = testgen::random_instance(rng, n, packets, 2 * n, 6 * n, lambda);
    StreamSolver s(n);
    for (std::size_t k = 0; k < packets; ++k) s.push(inst.batches[k], inst.lambdas[k]);
    const auto dense = solve_dense(make_problem(inst.batches, inst.lambdas, n));
    worst = std::max(worst, testgen::relative_error(s.full_backward_sweep(), dense));
  }
  return {worst <= 1e-9, "200 instances, worst relative difference " + fmt("%.2e", worst)};
}

Outcome lag_decay() {
  const auto& r = experiment("level-crossing");
  const auto& t = r.lags;
  double lag3 = -1e300;
  bool monotone = true;
  for (std::size_t j = 0; j < t.cols.size(); ++j) {
    double prev = 1e300;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (!t.values[i][j]) continue;
      const double v = *t.values[i][j];
      if (t.rows[i] - t.cols[j] == 3) lag3 = std::max(lag3, v);
      // below 1e-12 the table is round-off
      if (prev > -12.0 && v > prev) monotone = false;
      prev = v;
    }
  }
  const double slope = r.lag_summary.slope;
  const bool pass = lag3 <= -6.0 && monotone && slope <= -1.5;
  return {pass, "worst lag-3 entry " + fmt("%.2f", lag3) + ", slope " + fmt("%.2f", slope) + " decades/lag" +
                    (monotone ? ", monotone" : ", NOT monotone")};
}

Outcome reconstruction_bands() {
  const double lc = experiment("level-crossing").rmse;
  const double dd = experiment("delay-doppler").rmse;
  return {lc <= 0.03 && dd <= 0.15, "level-crossing RMSE " + fmt("%.4f", lc) + " (<= 0.03), delay-doppler RMSE " +
                                        fmt("%.4f", dd) + " (<= 0.15)"};
}

Outcome truncated_memory() {
  const auto& lc = experiment("level-crossing");
  const auto& dd = experiment("delay-doppler");
  if (!lc.truncated_difference || !dd.truncated_difference) return {false, "truncated run missing"};
  const double a = *lc.truncated_difference, b = *dd.truncated_difference;
  return {a <= 1e-6 && b <= 1e-6,
          "L_max = 3 coefficient difference " + fmt("%.2e", a) + " (level-crossing), " + fmt("%.2e", b) +
              " (delay-doppler)"};
}

Outcome slepian_spectrum() {
  const auto start = std::chrono::steady_clock::now();
  const SlepianBuild b = build_slepian_lot(16.0, 0.25, 40, 1024);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& ev = b.spectrum.eigenvalues;
  const double ratio = ev[39] / ev[0];
  return {ratio <= 1e-7 && secs <= 120.0,
          "eigenvalue 40 / largest " + fmt("%.3e", ratio) + " (need <= 1e-7), " + fmt("%.0f", secs) + " s"};
}

Outcome schur_bound() {
  testgen::Rng rng(6001);
  double worst = -1e300;
  std::size_t blocks = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = testgen::draw_in_regime(rng);
    for (const auto& q : g.solver.trace().q) {
      Matrix d = q;
      add_diagonal(d, -g.report.kappa);
      const auto range = eigen_range(d);
      const double dev = std::max(std::abs(range.min), std::abs(range.max)) / g.report.kappa;
      worst = std::max(worst, dev - g.report.epsilon);
      ++blocks;
    }
  }
  return {worst <= 1e-10, "500 instances, " + std::to_string(blocks) + " blocks, max(deviation - epsilon) " +
                              fmt("%.3e", worst)};
}

Outcome theorem_envelope_check() {
  testgen::Rng rng(7001);
  std::size_t checked = 0, violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = testgen::draw_in_regime(rng);
    const auto fin = g.solver.full_backward_sweep();
    for (const auto& [key, est] : g.solver.history().snapshots()) {
      const auto [k, K] = key;
      const double err = norm2(subtract(est, fin[static_cast<std::size_t>(k)]));
      const std::vector<std::size_t> lag{static_cast<std::size_t>(K - k)};
      const double bound = theorem_envelope(g.report, lag)[0];
      ++checked;
      if (err > bound + 1e-10) ++violations;
      if (bound > 0.0) tightest = std::max(tightest, err / bound);
    }
  }
  return {violations == 0, std::to_string(checked) + " lag errors, " + std::to_string(violations) +
                               " violations, largest error/bound " + fmt("%.3f", tightest)};
}

Outcome basis_sanity() {
  testgen::Rng rng(8001);
  double pou = 0.0;
  const WindowSpec w{0.25};
  for (int i = 0; i < 100000; ++i) {
    const double t = testgen::uniform(rng, -1.0, 2.0);
    double s = 0.0;
    for (long k = -2; k <= 2; ++k) s += std::pow(window_eval(w, t - static_cast<double>(k)), 2);
    pou = std::max(pou, std::abs(s - 1.0));
  }
  double gram = 0.0, beta = 0.0;
  for (std::size_t n : {8, 32, 128}) {
    const PacketBasis b = build_lot(n, 0.25);
    const QuadratureRule q = packet_quadrature(b, 0);
    Matrix g = quadrature_gram(b, q);
    add_diagonal(g, -1.0);
    gram = std::max(gram, max_abs(g));
    // packets 0 and 1 must also be orthogonal to each other
    Vector p0(n), p1(n);
    Matrix cross(n, n);
    for (std::size_t i = 0; i < q.size(); ++i) {
      b.evaluate(0, q.nodes[i], p0);
      b.evaluate(1, q.nodes[i], p1);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c) cross(a, c) += q.weights[i] * p0[a] * p1[c];
    }
    gram = std::max(gram, max_abs(cross));
    beta = std::max(beta, flatness_beta(b, 64 * n));
  }
  return {pou <= 1e-12 && gram <= 1e-8 && beta <= 2.0, "partition of unity " + fmt("%.1e", pou) + ", Gram " +
                                                           fmt("%.1e", gram) + ", max beta " + fmt("%.3f", beta)};
}

// Smallest M on a quarter-octave grid from `start` with success >= 1 - 3p.
std::optional<double> required_rate(const PacketBasis& basis, double start, double stop, std::vector<double>* medians) {
  for (double m = start; m <= stop * 1.0001; m *= std::pow(2.0, 0.25)) {
    const std::vector<double> grid{m};
    const auto r = sampling_monte_carlo(basis, grid, 20, 0.05, 0.2, 9001);
    if (medians) medians->push_back(r.points[0].delta[1]);
    if (r.required_m) return m;
  }
  return std::nullopt;
}

Outcome sampling_trend() {
  const PacketBasis b16 = build_lot(16, 0.25), b64 = build_lot(64, 0.25);
  std::vector<double> medians;
  const auto m16 = required_rate(b16, 256.0, 65536.0, &medians);
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  if (!m16) return {false, "no rate reached delta 0.2 at N = 16"};
  const double c = *m16 / (16.0 * std::log(16.0));
  const double predicted = c * 64.0 * std::log(64.0);
  const auto m64 = required_rate(b64, predicted / 2.0, 2.0 * predicted, nullptr);
  const bool pass = decreasing && m64.has_value();
  return {pass, "M(16) " + fmt("%.0f", *m16) + ", c " + fmt("%.2f", c) + ", predicted M(64) " +
                    fmt("%.0f", predicted) + ", measured " + (m64 ? fmt("%.0f", *m64) : std::string("> 2x")) +
                    (decreasing ? ", medians decreasing" : ", medians NOT decreasing")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"oracle equivalence", oracle_equivalence, 60.0},
      {"exponential lag decay", lag_decay, 300.0},
      {"reconstruction accuracy", reconstruction_bands, 300.0},
      {"truncated-memory fidelity", truncated_memory, 300.0},
      {"Slepian spectrum", slepian_spectrum, 120.0},
      {"Schur complement bound", schur_bound, 0.0},
      {"convergence envelope", theorem_envelope_check, 0.0},
      {"basis sanity", basis_sanity, 0.0},
      {"sampling-rate trend", sampling_trend, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].budget_s > 0.0 && secs > criteria[i].budget_s) {
      o.pass = false;
      o.detail += " (over the time budget)";
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
