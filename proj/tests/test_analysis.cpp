#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

#include "streamlsh/analysis.hpp"
#include "streamlsh/error.hpp"
#include "streamlsh/lsh.hpp"
#include "streamlsh/random.hpp"
#include "streamlsh/sweep.hpp"
#include "support.hpp"

using namespace streamlsh;
using namespace streamlsh::analysis;

namespace {

double binomial(unsigned n, unsigned j) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
}

/// Exact integral over s in [r, 1] of 1 - (1 - c s^k)^L by binomial expansion.
double success_integral(unsigned k, unsigned tables, double c, double r) {
  double total = 0.0;
  for (unsigned j = 1; j <= tables; ++j) {
    const double sign = j % 2 ? 1.0 : -1.0;
    const double e = static_cast<double>(k * j + 1);
    total += sign * binomial(tables, j) * std::pow(c, j) * (1.0 - std::pow(r, e)) / e;
  }
  return total;
}

}  // namespace

TEST_CASE("SP closed forms at reference points") {
  CHECK(sp_threshold(10, 15, 20, 1.0, 0, 1.0) == 1.0);
  CHECK(sp_threshold(10, 15, 20, 0.9, 20, 1.0) == 0.0);
  CHECK(sp_threshold(10, 15, 20, 0.9, 19.5, 1.0) > 0.0);
  CHECK(sp_threshold(10, 15, 20, 0.9, 5, 1.0) == doctest::Approx(0.99839).epsilon(1e-5));
  CHECK(sp_smooth(10, 15, 0.95, 1.0, 0, 1.0) == 1.0);
  CHECK(sp_smooth(10, 15, 0.95, 0.9, 7, 0.0) == 0.0);
  // 0.95^20 * 0.9^10 = 0.35849 * 0.34868 = 0.12500
  CHECK(sp_smooth(10, 15, 0.95, 0.9, 20, 1.0) == doctest::Approx(1.0 - std::pow(1.0 - 0.35848592 * 0.34867844, 15)).epsilon(1e-7));
  CHECK(sp_smooth(10, 15, 0.95, 0.9, 20, 1.0) == doctest::Approx(0.86506).epsilon(1e-5));
  CHECK(sp(SmoothModel{0.95}, 10, 15, 0.8, 3, 0.5) == sp_smooth(10, 15, 0.95, 0.8, 3, 0.5));
  CHECK(sp(ThresholdModel{20}, 10, 15, 0.8, 3, 0.5) == sp_threshold(10, 15, 20, 0.8, 3, 0.5));
}

TEST_CASE("threshold SP matches fresh LSH families") {
  // 2 * 10^4 independent families; binomial standard error is about 0.0003
  const auto [u, v] = testing::pair_at(0.9);
  int found = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const LshFamily family(10, 15, derive_seed(1234, {static_cast<std::uint64_t>(i)}));
    const auto a = family.sketches(u), b = family.sketches(v);
    bool hit = false;
    for (std::size_t t = 0; t < 15 && !hit; ++t) hit = a[t] == b[t];
    found += hit;
  }
  CHECK(std::abs(static_cast<double>(found) / trials - sp_threshold(10, 15, 20, 0.9, 0, 1.0)) < 0.005);
}

TEST_CASE("SP stays in range and moves the right way") {
  for (double s = 0.5; s <= 1.0; s += 0.05) {
    for (double a = 0; a <= 60; a += 3) {
      for (double z : {0.1, 0.5, 1.0}) {
        const double v = sp_smooth(10, 15, 0.95, s, a, z);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (s < 0.99) CHECK(sp_smooth(10, 15, 0.95, s + 0.01, a, z) > v);
        CHECK(sp_smooth(10, 15, 0.95, s, a + 1, z) < v);
        if (z < 1.0) CHECK(sp_smooth(10, 15, 0.95, s, a, z + 0.05) > v);
        CHECK(sp_smooth(10, 15, 0.96, s, a + 1, z) > sp_smooth(10, 15, 0.95, s, a + 1, z));
      }
    }
  }
}

TEST_CASE("quadrature") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::pow(x, 5); }, 0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return x; }, 2, 2) == 0.0);
}

TEST_CASE("CSP against the binomial-expansion integral") {
  for (double r_sim : {0.5, 0.8, 0.9}) {
    for (unsigned r_age : {0u, 1u, 10u, 40u}) {
      double smooth = 0.0, threshold = 0.0;
      const unsigned last = std::min(r_age, 19u);
      for (unsigned a = 0; a <= r_age; ++a) smooth += success_integral(10, 15, std::pow(0.95, a), r_sim);
      for (unsigned a = 0; a <= last; ++a) threshold += success_integral(10, 15, 1.0, r_sim);
      const double norm = (r_age + 1.0) * (1.0 - r_sim);
      CHECK(std::abs(csp(SmoothModel{0.95}, 10, 15, r_sim, r_age) - smooth / norm) < 1e-6);
      CHECK(std::abs(csp(ThresholdModel{20}, 10, 15, r_sim, r_age) - threshold / norm) < 1e-6);
    }
  }
  // fractional T_age: a < 20.5 keeps ages 0..20
  const double full = success_integral(10, 15, 1.0, 0.8);
  CHECK(std::abs(csp(ThresholdModel{20.5}, 10, 15, 0.8, 30) - 21 * full / (31 * 0.2)) < 1e-6);
}

TEST_CASE("CSP limits and errors") {
  CHECK(csp(SmoothModel{0.95}, 10, 15, 1.0 - 1e-9, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(csp(ThresholdModel{20}, 10, 15, 0.8, 19) ==
        doctest::Approx(success_integral(10, 15, 1.0, 0.8) / 0.2).epsilon(1e-9));
  CHECK_THROWS_AS(csp(SmoothModel{0.95}, 10, 15, 1.0, 5), DomainError);
}

TEST_CASE("quality CSP reductions") {
  const double plain = csp(SmoothModel{0.95}, 10, 15, 0.8, 20);
  CHECK(csp_quality(QualityIndexing::Sensitive, 10, 15, 0.95, 0.8, 20, 1.0, PointQuality{1.0}) ==
        doctest::Approx(plain).epsilon(1e-9));
  for (unsigned r_age : {10u, 50u}) {
    CHECK(csp_quality(QualityIndexing::Sensitive, 10, 15, 0.9, 0.8, r_age, 0.3, PointQuality{1.0}) ==
          doctest::Approx(csp_quality(QualityIndexing::Insensitive, 10, 15, 0.9, 0.8, r_age, 0.3, PointQuality{1.0}))
              .epsilon(1e-12));
    // insensitive indexing ignores quality entirely
    CHECK(csp_quality(QualityIndexing::Insensitive, 10, 15, 0.9, 0.8, r_age, 0.5) ==
          doctest::Approx(csp(SmoothModel{0.9}, 10, 15, 0.8, r_age)).epsilon(1e-9));
  }
  CHECK(mean_quality(UniformQuality{}) == 0.5);
  CHECK(mean_quality(HistogramQuality{{0.0, 0.5, 1.0}, {1.0, 3.0}}) == doctest::Approx(0.625));
  CHECK_THROWS_AS(csp_quality(QualityIndexing::Sensitive, 10, 15, 0.95, 0.8, 10, 0.9, PointQuality{0.5}), DomainError);
  CHECK_THROWS_AS(csp_quality(QualityIndexing::Sensitive, 10, 15, 0.95, 1.0, 10, 0.5), DomainError);
}

TEST_CASE("quality CSP with uniform quality against nested sums") {
  // sensitive: mean over z in [R_q, 1] of the z-scaled binomial integral
  const double r_q = 0.5;
  double direct = 0.0;
  const int steps = 2000;
  for (unsigned a = 0; a <= 10; ++a) {
    double over_z = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double z = r_q + (1.0 - r_q) * (i + 0.5) / steps;
      over_z += success_integral(10, 15, std::pow(0.95, a) * z, 0.8);
    }
    direct += over_z / steps;
  }
  direct /= 11 * 0.2;
  CHECK(std::abs(csp_quality(QualityIndexing::Sensitive, 10, 15, 0.95, 0.8, 10, r_q) - direct) < 1e-6);
}

TEST_CASE("index size and retained copies") {
  CHECK(expected_index_size(100, 1.0, 0.95, 15) == doctest::Approx(30000));
  CHECK(expected_index_size(100, 0.0, 0.95, 15) == 0.0);
  CHECK(expected_index_size(100, 0.7, 0.95, 1) == doctest::Approx(20 * 100 * 0.7));
  CHECK(threshold_age(2000, 100, 1.0) == doctest::Approx(20));
  CHECK(expected_copies(SmoothModel{0.95}, 15, 0.5, 20) == doctest::Approx(2.689).epsilon(1e-3));
  CHECK(expected_copies(SmoothModel{0.95}, 15, 0.5, 0) == 7.5);
  CHECK(expected_copies(ThresholdModel{20}, 15, 0.5, 0) == 7.5);
  CHECK(expected_copies(ThresholdModel{20}, 15, 0.5, 19) == 7.5);
  CHECK(expected_copies(ThresholdModel{20}, 15, 0.5, 20) == 0.0);
}

TEST_CASE("SB and DynaPop SP") {
  CHECK(sb(0.95, 1.0, 1.0, 1.0) == 1.0);
  CHECK(sb(0.95, 1.0, 0.0, 1.0) == 0.0);
  CHECK(sb(0.95, 1.0, 0.5, 1.0) == doctest::Approx(0.5 / (1 - 0.95 * 0.5)));
  CHECK_THROWS_AS(sb(1.0, 1.0, 0.0, 1.0), DomainError);
  CHECK(sp_dynapop(10, 15, 0.95, 1.0, 0.9, 0.0, 1.0) == 0.0);
  CHECK(sp_dynapop(10, 15, 0.95, 1.0, 1.0, 1.0, 1.0) == 1.0);
  const double w = 0.2, s = 0.85;
  CHECK(sp_dynapop(10, 15, 0.9, 0.5, s, w, 0.7) ==
        doctest::Approx(1.0 - std::pow(1.0 - sb(0.9, 0.5, w, 0.7) * std::pow(s, 10), 15)).epsilon(1e-14));
}

TEST_CASE("DynaPop SP grows with popularity and similarity") {
  for (double s : {0.7, 0.8, 0.9}) {
    double previous = -1.0;
    for (int r = 100; r >= 1; --r) {
      const double v = sp_dynapop(10, 15, 0.95, 1.0, s, 1.0 / r, 1.0);
      CHECK(v >= previous);
      previous = v;
      CHECK(sp_dynapop(10, 15, 0.95, 1.0, s + 0.1, 1.0 / r, 1.0) >= v);
    }
  }
}

TEST_CASE("empirical CSP is the mean SP") {
  const std::vector<Observation> sample{{0.9, 3, 1.0}, {0.8, 0, 0.5}, {0.99, 40, 0.2}};
  double mean = 0.0;
  for (const auto& o : sample) mean += sp_smooth(10, 15, 0.9, o.similarity, o.age, o.quality) / 3.0;
  CHECK(csp_empirical(SmoothModel{0.9}, 10, 15, sample) == doctest::Approx(mean).epsilon(1e-14));
  CHECK_THROWS_AS(csp_empirical(SmoothModel{0.9}, 10, 15, {}), DomainError);
}

TEST_CASE("capacity equality check") {
  CHECK_NOTHROW(require_equal_capacity(30000, 28000, 0.1, "x"));
  CHECK_THROWS_AS(require_equal_capacity(30000, 26000, 0.1, "x"), ValidationError);
}

TEST_CASE("sweeps") {
  const auto fig4a = run_sweeps(preset("fig4a"));
  CHECK(fig4a.columns == std::vector<std::string>{"function", "k", "L", "t_age", "r_sim", "r_age", "p", "value"});
  REQUIRE(fig4a.rows.size() == 20);
  CHECK(fig4a.rows[0][0] == "csp_threshold");
  CHECK(fig4a.rows[10][0] == "csp_smooth");
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(fig4a.rows[i][4] == "0.8");
    CHECK(fig4a.rows[i][5] == std::to_string(10 * (i + 1)));
  }
  const auto fig2 = run_sweeps(preset("fig2"));
  CHECK(fig2.rows.size() == 2 * 2 * 61);
  CHECK(run_sweeps({SweepSpec{"sb", {}}}).rows.size() == 1);
  CHECK(run_sweeps({SweepSpec{"sp_smooth", {{"a", {20}}}}}).rows[0].back() ==
        fmt::format("{}", sp_smooth(10, 15, 0.95, 0.9, 20, 1.0)));
  for (const auto& name : preset_names()) CHECK_FALSE(run_sweeps(preset(name)).rows.empty());

  CHECK_THROWS_AS(run_sweeps({SweepSpec{"nope", {}}}), ValidationError);
  CHECK_THROWS_AS(run_sweeps({SweepSpec{"sp_smooth", {{"p", {1.5}}}}}), ValidationError);
  CHECK_THROWS_AS(run_sweeps({SweepSpec{"sp_smooth", {{"bogus", {1}}}}}), ValidationError);
  CHECK_THROWS_AS(run_sweeps({SweepSpec{"sp_smooth", {{"k", {2.5}}}}}), ValidationError);
  CHECK_THROWS_AS(preset("fig5"), ValidationError);

  CHECK(parse_grid_axis("a=1,2,5") == std::pair<std::string, std::vector<double>>{"a", {1, 2, 5}});
  CHECK(parse_grid_axis("s=0:1:0.25").second == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_grid_axis("s=0.7:0.9:0.1").second == std::vector<double>{0.7, 0.8, 0.9});
  CHECK_THROWS_AS(parse_grid_axis("a"), ValidationError);
  CHECK_THROWS_AS(parse_grid_axis("a=1:0:1"), ValidationError);
  CHECK_THROWS_AS(parse_grid_axis("a=x"), ValidationError);

  std::ostringstream csv;
  run_sweeps({SweepSpec{"sb", {{"rho", {0.5}}}}}).write_csv(csv);
  CHECK(csv.str().rfind("function,p,u,rho,z,value\nsb,0.95,1,0.5,1,", 0) == 0);
}
