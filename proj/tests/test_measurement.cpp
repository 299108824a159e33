#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/measurement.hpp"
#include "streamrec/signals.hpp"

using namespace streamrec;

namespace {

SampleStream from_times(std::initializer_list<double> ts) {
  SampleStream s;
  for (double t : ts) s.push_back({t, 0.0});
  return s;
}

// x = sum_k sum_n alpha_k[n] psi_{k,n} for packets first..last
struct Synth {
  const PacketBasis* basis;
  long first;
  std::vector<Vector> alpha;
  double operator()(double t) const {
    double x = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) x += synthesize(*basis, alpha[i], first + static_cast<long>(i), t);
    return x;
  }
  const Vector& at(long k) const { return alpha[static_cast<std::size_t>(k - first)]; }
};

Vector model(const SampleBatch& b, const Vector& prev, const Vector& cur) {
  const Vector y1 = b.b * prev;
  const Vector y2 = b.a * cur;
  Vector y(y1.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = y1[i] + y2[i];
  return y;
}

}  // namespace

TEST_CASE("batch index follows the half-open rule") {
  CHECK(batch_index(-0.2, 0.25) == 0);
  CHECK(batch_index(0.3, 0.25) == 0);
  CHECK(batch_index(0.74, 0.25) == 0);
  CHECK(batch_index(0.75, 0.25) == 1);
  CHECK(batch_index(-0.25, 0.25) == 0);
  CHECK(batch_index(-0.26, 0.25) == -1);
  CHECK(batch_index(5.75, 0.25) == 6);
  CHECK_THROWS_AS(batch_index(std::nan(""), 0.25), std::invalid_argument);
}

TEST_CASE("batch_stream") {
  SUBCASE("all in batch 0") {
    const auto b = batch_stream(from_times({-0.2, 0.3, 0.74}), 0.25);
    REQUIRE(b.size() == 1u);
    CHECK(b[0].k == 0);
    CHECK(b[0].size() == 3u);
  }
  SUBCASE("boundary goes to the later batch") {
    const auto b = batch_stream(from_times({0.1, 0.75}), 0.25);
    REQUIRE(b.size() == 2u);
    CHECK(b[0].size() == 1u);
    CHECK(b[1].size() == 1u);
    CHECK(b[1].times[0] == 0.75);
  }
  SUBCASE("empty stream") { CHECK(batch_stream(SampleStream{}, 0.25).empty()); }
  SUBCASE("gaps produce empty batches") {
    const auto b = batch_stream(from_times({0.0, 3.0}), 0.25);
    REQUIRE(b.size() == 4u);
    CHECK(b[1].size() == 0u);
    CHECK(b[2].size() == 0u);
    CHECK(b[2].k == 2);
  }
  SUBCASE("range rejects outside samples") {
    const auto b = batch_stream(from_times({-1.0, 0.0, 1.0, 9.0}), 0.25, BatchRange{0, 2});
    REQUIRE(b.size() == 3u);
    CHECK(b[0].size() == 1u);
    CHECK(b[1].size() == 1u);
    CHECK(b[2].size() == 0u);
  }
  SUBCASE("unsorted") { CHECK_THROWS_AS(batch_stream(from_times({0.5, 0.2}), 0.25), UnsortedStream); }
  SUBCASE("non-finite") { CHECK_THROWS_AS(batch_stream(from_times({0.5, INFINITY}), 0.25), std::invalid_argument); }
}

TEST_CASE("property: batching partitions the stream in order") {
  testgen::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const double eta = testgen::uniform(rng, 0.05, 0.5);
    std::vector<double> ts(testgen::pick(rng, 0, 200));
    for (double& t : ts) t = testgen::uniform(rng, -3.0, 6.0);
    std::sort(ts.begin(), ts.end());
    SampleStream s;
    for (double t : ts) s.push_back({t, testgen::normal(rng)});
    const auto batches = batch_stream(s, eta);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < batches.size(); ++i) {
      const auto& b = batches[i];
      if (i > 0) REQUIRE(b.k == batches[i - 1].k + 1);
      for (std::size_t m = 0; m < b.size(); ++m) {
        REQUIRE(b.times[m] >= static_cast<double>(b.k) - eta);
        REQUIRE(b.times[m] < static_cast<double>(b.k) + 1.0 - eta);
        REQUIRE(s[b.members[m]].t == b.times[m]);
        REQUIRE(s[b.members[m]].y == b.values[m]);
        order.push_back(b.members[m]);
      }
    }
    REQUIRE(order.size() == s.size());
    for (std::size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == i);
  }
}

TEST_CASE("assemble_point") {
  const PacketBasis basis = build_lot(12, 0.25);
  SUBCASE("mid-packet sample has a zero B row") {
    auto b = batch_stream(SampleStream{{3.5, 0.0}}, 0.25);
    assemble_point(b[0], basis);
    for (std::size_t n = 0; n < 12; ++n) CHECK(b[0].b(0, n) == 0.0);
    CHECK(b[0].a(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("a single basis function gives a column of A") {
    testgen::Rng rng(1);
    SampleStream s;
    for (int i = 0; i < 20; ++i) s.push_back({testgen::uniform(rng, 1.75, 2.75), 0.0});
    std::sort(s.begin(), s.end(), [](auto& p, auto& q) { return p.t < q.t; });
    for (auto& x : s) x.y = basis.eval(2, 5, x.t);
    auto b = batch_stream(s, 0.25);
    REQUIRE(b.size() == 1u);
    assemble_point(b[0], basis);
    for (std::size_t m = 0; m < b[0].size(); ++m) CHECK(b[0].values[m] == b[0].a(m, 4));
  }
}

TEST_CASE("property: point samples of a synthesized signal satisfy the batch model") {
  testgen::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = testgen::pick(rng, 4, 20);
    const double eta = testgen::uniform(rng, 0.05, 0.5);
    const PacketBasis basis = build_lot(n, eta);
    Synth x{&basis, -1, {}};
    for (int k = -1; k <= 4; ++k) x.alpha.push_back(testgen::random_vector(rng, n));
    SampleStream s;
    for (int i = 0; i < 300; ++i) s.push_back({testgen::uniform(rng, -eta, 4.0 - eta), 0.0});
    std::sort(s.begin(), s.end(), [](auto& p, auto& q) { return p.t < q.t; });
    for (auto& p : s) p.y = x(p.t);
    auto batches = batch_stream(s, eta);
    for (auto& b : batches) {
      assemble_point(b, basis);
      const Vector y = model(b, x.at(b.k - 1), x.at(b.k));
      REQUIRE(norm2(subtract(y, b.values)) <= 1e-12 * std::max(1.0, norm2(b.values)));
    }
  }
}

TEST_CASE("assemble_kernel") {
  const PacketBasis basis = build_lot(10, 0.25);
  SUBCASE("too long") {
    SampleBatch b;
    b.k = 0;
    b.times = {0.5};
    b.values = {0.0};
    KernelMeasurementSpec spec{[](double, double) { return 1.0; }, 0.51, {}};
    CHECK_THROWS_AS(assemble_kernel(b, basis, spec), KernelTooLong);
    spec.length = 0.5;  // equality is accepted
    CHECK_NOTHROW(assemble_kernel(b, basis, spec));
  }
  SUBCASE("narrow box tends to point evaluation") {
    testgen::Rng rng(2);
    SampleStream s;
    for (int i = 0; i < 30; ++i) s.push_back({testgen::uniform(rng, 0.75, 1.75), 0.0});
    std::sort(s.begin(), s.end(), [](auto& p, auto& q) { return p.t < q.t; });
    double prev = INFINITY;
    for (double w : {1e-2, 1e-3, 1e-4}) {
      auto kb = batch_stream(s, 0.25);
      KernelMeasurementSpec spec{[w](double, double) { return 1.0 / w; }, w, {}};
      assemble_kernel(kb[0], basis, spec);
      // point samples at the box centres
      SampleStream mids = s;
      for (auto& p : mids) p.t -= w / 2.0;
      auto pb = batch_stream(mids, 0.25, BatchRange{1, 1});
      pb[0].k = kb[0].k;
      assemble_point(pb[0], basis);
      const double err = std::max(max_abs(kb[0].a - pb[0].a), max_abs(kb[0].b - pb[0].b));
      CHECK(err < prev);
      prev = err;
      if (w == 1e-4) CHECK(err <= 1e-6);
    }
  }
  SUBCASE("box over a region where the packets vanish") {
    SampleBatch b;
    b.k = 3;
    b.times = {3.5};
    b.values = {0.0};
    KernelMeasurementSpec spec{[](double, double) { return 1.0; }, 0.2, {}};
    assemble_kernel(b, basis, spec);
    for (std::size_t n = 0; n < 10; ++n) CHECK(b.b(0, n) == 0.0);
  }
  SUBCASE("smooth kernel against direct quadrature") {
    testgen::Rng rng(3);
    Synth x{&basis, 0, {testgen::random_vector(rng, 10), testgen::random_vector(rng, 10)}};
    auto h = [](double tm, double t) { return std::exp(-(tm - t)) * (1.0 + (tm - t)); };
    KernelMeasurementSpec spec{h, 0.4, {}};
    SampleBatch b;
    b.k = 1;
    b.times = {0.8, 1.1, 1.3, 1.7};
    b.values.assign(4, 0.0);
    assemble_kernel(b, basis, spec);
    const Vector y = model(b, x.at(0), x.at(1));
    for (std::size_t m = 0; m < 4; ++m) {
      const double tm = b.times[m];
      std::vector<double> cuts{tm - 0.4};
      for (double c : {0.75, 1.0, 1.25, 1.75, 2.0, 2.25})
        if (c > tm - 0.4 && c < tm) cuts.push_back(c);
      cuts.push_back(tm);
      const auto rule = composite_gauss_legendre(cuts, 20, 1.0 / 200.0);
      const double direct = rule.integrate([&](double t) { return h(tm, t) * x(t); });
      CHECK(std::abs(direct - y[m]) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("property: narrow-kernel error decreases monotonically") {
  testgen::Rng rng(41);
  const PacketBasis basis = build_lot(8, 0.25);
  for (int trial = 0; trial < 10; ++trial) {
    SampleBatch b0;
    b0.k = 2;
    b0.times = {testgen::uniform(rng, 1.8, 2.7)};
    b0.values = {0.0};
    SampleBatch p = b0;
    assemble_point(p, basis);
    double prev = INFINITY;
    for (double w : {1e-2, 1e-3, 1e-4}) {
      SampleBatch kb = b0;
      assemble_kernel(kb, basis, KernelMeasurementSpec{[w](double, double) { return 1.0 / w; }, w, {}});
      const double err = max_abs(kb.a - p.a) + max_abs(kb.b - p.b);
      REQUIRE(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("tap measurements") {
  const PacketBasis basis = build_lot(24, 0.25);
  testgen::Rng rng(4);
  Synth x{&basis, -1, {}};
  for (int k = -1; k <= 3; ++k) x.alpha.push_back(testgen::random_vector(rng, 24));
  SUBCASE("identity channel") {
    const std::vector<Tap> taps{{1.0, 0.0, 0.0}};
    for (double t : {0.1, 0.7, 1.3}) CHECK(tap_response(taps, x, t) == x(t));
  }
  SUBCASE("experiment taps against direct evaluation") {
    const auto taps = default_taps();
    SampleStream s = delay_doppler_sample(x, taps, 0.01, 0.5, 2.7);
    auto batches = batch_stream(s, 0.25);
    for (auto& b : batches) {
      assemble_taps(b, basis, taps);
      const Vector y = model(b, x.at(b.k - 1), x.at(b.k));
      for (std::size_t m = 0; m < b.size(); ++m) {
        double direct = 0.0;
        for (const auto& tap : taps)
          direct += tap.a * std::cos(2.0 * std::numbers::pi * tap.f * (b.times[m] - tap.tau)) * x(b.times[m] - tap.tau);
        REQUIRE(std::abs(direct - y[m]) <= 1e-10);
        REQUIRE(std::abs(direct - b.values[m]) <= 1e-10);
      }
    }
  }
  SUBCASE("delay too long") {
    SampleBatch b;
    b.k = 1;
    b.times = {1.0};
    b.values = {0.0};
    const std::vector<Tap> taps{{1.0, 0.6, 0.0}};
    CHECK_THROWS_AS(assemble_taps(b, basis, taps), KernelTooLong);
  }
}

TEST_CASE("noise") {
  SampleStream a{{0.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}};
  SampleStream b = a;
  add_noise(a, 0.1, 7);
  add_noise(b, 0.1, 7);
  CHECK(a == b);
  CHECK(a[0].y != 1.0);
  SampleStream c{{0.0, 1.0}};
  add_noise(c, 0.0, 7);
  CHECK(c[0].y == 1.0);
  CHECK_THROWS_AS(add_noise(c, -1.0, 7), std::invalid_argument);
}
