#include <doctest.h>

#include <cmath>
#include <vector>

#include "geoscale/scaling.hpp"
#include "geoscale/synth.hpp"
#include "test_util.hpp"

using namespace geoscale;
using doctest::Approx;
using metrics::AttractivenessTable;
using scaling::ScalingClass;

namespace {

AttractivenessTable table_of(
    const std::vector<std::pair<double, double>>& rows) {
  AttractivenessTable t;
  t.source_label = "test";
  int i = 0;
  for (auto [p, a] : rows)
    t.rows.push_back({"r" + std::to_string(i++), p, a});
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("scaling");

TEST_CASE("student t critical values") {
  // reference values computed independently at 40-digit precision
  CHECK(scaling::student_t_975(1) == Approx(12.706204736174705).epsilon(1e-12));
  CHECK(scaling::student_t_975(2) == Approx(4.302652729749464).epsilon(1e-12));
  CHECK(scaling::student_t_975(3) == Approx(3.182446305283710).epsilon(1e-12));
  CHECK(scaling::student_t_975(4) == Approx(2.776445105197794).epsilon(1e-12));
  CHECK(scaling::student_t_975(5) == Approx(2.570581835636316).epsilon(1e-12));
  CHECK(scaling::student_t_975(10) == Approx(2.228138851986275).epsilon(1e-12));
  CHECK(scaling::student_t_975(30) == Approx(2.042272456301238).epsilon(1e-12));
  CHECK(scaling::student_t_975(100) == Approx(1.983971518523552).epsilon(1e-12));
  CHECK(scaling::student_t_975(236) == Approx(1.970066853102126).epsilon(1e-12));
  CHECK_THROWS(scaling::student_t_975(0));
}

TEST_CASE("exact log-log line fits perfectly") {
  auto fit = scaling::fit_power_law(table_of({{1, 1}, {10, 10}, {100, 100}}));
  CHECK(fit.beta == Approx(1.0).epsilon(1e-15));
  CHECK(fit.log_a == Approx(0.0).scale(1).epsilon(1e-15));
  CHECK(fit.r2 == Approx(1.0).epsilon(1e-15));
  CHECK(fit.n == 3);
  CHECK(fit.classification == ScalingClass::linear);
  REQUIRE(fit.ci_low.has_value());
  CHECK(*fit.ci_low == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("two points give the analytic slope and no interval") {
  auto fit = scaling::fit_power_law(table_of({{1, 2}, {100, 20}}));
  CHECK(fit.beta == Approx(0.5).epsilon(1e-15));
  CHECK(fit.log_a == Approx(std::log10(2.0)).epsilon(1e-15));
  CHECK(fit.n == 2);
  CHECK_FALSE(fit.ci_low.has_value());
  CHECK_FALSE(fit.ci_high.has_value());
  CHECK_FALSE(fit.se.has_value());
  CHECK(fit.r2 == Approx(1.0).epsilon(1e-15));
  auto j = fit.to_json();
  CHECK(j.find("\"ci_low\": null") != std::string::npos);
}

TEST_CASE("five-point fixture matches the closed-form oracle to 1e-9") {
  auto fit = scaling::fit_power_law(
      table_of({{10, 8}, {100, 30}, {1000, 90}, {10000, 250}, {100000, 900}}));
  // frozen from an independent 40-digit OLS on the log10 values
  CHECK(std::abs(fit.beta - 0.5023123798847138) < 1e-9);
  CHECK(std::abs(fit.log_a - 0.4303901141983174) < 1e-9);
  REQUIRE(fit.se.has_value());
  CHECK(std::abs(*fit.se - 0.0126831762134273) < 1e-9);
  CHECK(std::abs(*fit.ci_low - 0.4619488526050297) < 1e-9);
  CHECK(std::abs(*fit.ci_high - 0.5426759071643978) < 1e-9);
  CHECK(std::abs(fit.r2 - 0.9980910273986923) < 1e-9);
  CHECK(fit.classification == ScalingClass::sublinear);
}

TEST_CASE("fit rejects degenerate inputs") {
  CHECK_THROWS(scaling::fit_power_law(table_of({{10, 5}})));
  CHECK_THROWS(scaling::fit_power_law(table_of({})));
  // only zero-A rows left
  CHECK_THROWS(scaling::fit_power_law(table_of({{10, 0}, {100, 0}, {1000, 0}})));
  // no variance in log p
  CHECK_THROWS_WITH_AS(
      scaling::fit_power_law(table_of({{10, 1}, {10, 2}, {10, 3}})),
      doctest::Contains("variance"), std::runtime_error);
}

TEST_CASE("zero-attractiveness rows are excluded and counted") {
  auto fit = scaling::fit_power_law(
      table_of({{1, 1}, {10, 10}, {100, 100}, {7, 0}, {9, 0}}));
  CHECK(fit.n == 3);
  CHECK(fit.excluded_zero_rows == 2);
  CHECK(fit.beta == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classification trichotomy") {
  CHECK(scaling::classify(0.488) == ScalingClass::sublinear);
  CHECK(scaling::classify(1.0) == ScalingClass::linear);
  CHECK(scaling::classify(1.5) == ScalingClass::superlinear);
  CHECK(scaling::classify(1.0 + 1e-13) == ScalingClass::linear);
  CHECK(scaling::classify(1.0 - 1e-13) == ScalingClass::linear);
  CHECK(scaling::classify(1.0 + 1e-11) == ScalingClass::superlinear);
  CHECK(scaling::classify(1.0 - 1e-11) == ScalingClass::sublinear);
  CHECK(scaling::to_string(ScalingClass::sublinear) == "sublinear");
}

TEST_CASE("scale equivariance: A -> k*A shifts only the intercept") {
  auto base = table_of({{10, 8}, {100, 30}, {1000, 90}, {10000, 250},
                        {100000, 900}});
  auto fit0 = scaling::fit_power_law(base);
  auto res0 = scaling::residuals(base, fit0);
  for (double k : {10.0, 0.5, 3.25}) {
    auto scaled = base;
    for (auto& r : scaled.rows) r.attractiveness *= k;
    auto fit1 = scaling::fit_power_law(scaled);
    CHECK(std::abs(fit1.beta - fit0.beta) < 1e-9);
    CHECK(std::abs(fit1.log_a - (fit0.log_a + std::log10(k))) < 1e-9);
    CHECK(std::abs(fit1.r2 - fit0.r2) < 1e-9);
    CHECK(std::abs((*fit1.ci_high - *fit1.ci_low) -
                   (*fit0.ci_high - *fit0.ci_low)) < 1e-9);
    CHECK(fit1.classification == fit0.classification);
    auto res1 = scaling::residuals(scaled, fit1);
    REQUIRE(res1.size() == res0.size());
    for (std::size_t i = 0; i < res0.size(); ++i)
      CHECK(std::abs(res1[i].residual - res0[i].residual) < 1e-9);
  }
}

TEST_CASE("noise-free synthetic tables invert exactly") {
  for (double beta : {0.3, 0.488, 0.64, 1.0, 1.2, 1.6}) {
    synth::SynthTableParams params;
    params.seed = 11;
    params.n_regions = 60;
    params.beta_true = beta;
    params.noise_sigma = 0;
    params.prefactor = 0.01;
    auto fit = scaling::fit_power_law(synth::generate_synthetic(params));
    CHECK(std::abs(fit.beta - beta) <= 1e-9);
    CHECK(std::abs(fit.log_a - std::log10(0.01)) <= 1e-9);
  }
}

TEST_CASE("residual basics") {
  auto table = table_of({{1, 1}, {10, 10}, {100, 100}});
  auto fit = scaling::fit_power_law(table);
  auto res = scaling::residuals(table, fit);
  REQUIRE(res.size() == 3);
  for (const auto& r : res) CHECK(std::abs(r.residual) < 1e-12);

  // observed = 10x expected somewhere -> residual +1 for that row
  auto bumped = table_of({{1, 1}, {10, 10}, {100, 100}, {1000, 10000}});
  scaling::ScalingFit unit_fit;
  unit_fit.beta = 1.0;
  unit_fit.log_a = 0.0;
  auto res2 = scaling::residuals(bumped, unit_fit);
  REQUIRE(res2.size() == 4);
  CHECK(res2[0].region_id == "r3");
  CHECK(res2[0].residual == Approx(1.0).epsilon(1e-12));
  CHECK(res2[1].residual == Approx(0.0).scale(1).epsilon(1e-12));

  // rows excluded from the fit carry no residual
  auto with_zero = table_of({{1, 1}, {10, 10}, {100, 0}});
  auto fit3 = scaling::fit_power_law(with_zero);
  CHECK(scaling::residuals(with_zero, fit3).size() == 2);
}

TEST_CASE("residuals sum to zero and sort descending") {
  synth::SynthTableParams params;
  params.seed = 23;
  params.n_regions = 150;
  params.beta_true = 0.7;
  params.noise_sigma = 1.3;
  auto table = synth::generate_synthetic(params);
  auto fit = scaling::fit_power_law(table);
  auto res = scaling::residuals(table, fit);
  REQUIRE(static_cast<int>(res.size()) == fit.n);
  double sum = 0;
  for (const auto& r : res) sum += r.residual;
  CHECK(std::abs(sum) < 1e-9);
  for (std::size_t i = 1; i < res.size(); ++i)
    CHECK(res[i - 1].residual >= res[i].residual);
}

TEST_CASE("log-normal moment fit") {
  std::vector<double> same = {7.5, 7.5, 7.5, 7.5};
  auto fit = scaling::fit_lognormal(same);
  CHECK(fit.mu == Approx(std::log(7.5)).epsilon(1e-15));
  CHECK(fit.sigma == 0.0);

  double e = std::exp(1.0);
  std::vector<double> powers = {1.0, e, e * e};
  fit = scaling::fit_lognormal(powers);
  CHECK(fit.mu == Approx(1.0).epsilon(1e-14));
  CHECK(fit.sigma == Approx(1.0).epsilon(1e-14));

  std::vector<double> bad = {1.0, -2.0, 3.0};
  CHECK_THROWS_WITH_AS(scaling::fit_lognormal(bad),
                       doctest::Contains("index 1"), std::runtime_error);
  std::vector<double> one = {1.0};
  CHECK_THROWS(scaling::fit_lognormal(one));
}

TEST_CASE("seeded log-normal sample recovers sigma") {
  synth::Rng rng(77);
  std::vector<double> values;
  values.reserve(10000);
  for (int i = 0; i < 10000; ++i)
    values.push_back(std::exp(2.3 * rng.normal()));
  auto fit = scaling::fit_lognormal(values);
  CHECK(std::abs(fit.sigma - 2.3) < 0.05);
  CHECK(std::abs(fit.mu) < 0.1);
}

TEST_CASE("histogram density integrates to one over log bins") {
  synth::Rng rng(13);
  std::vector<double> values;
  for (int i = 0; i < 5000; ++i)
    values.push_back(std::exp(1.5 * rng.normal() + 2.0));
  auto rows = scaling::histogram_lognormal(values, 24);
  REQUIRE(rows.size() == 24);
  // bin width in ln-space from the geometric centers
  double width = std::log(rows[1].bin_center) - std::log(rows[0].bin_center);
  double mass = 0, fitted_mass = 0;
  for (const auto& r : rows) {
    mass += r.empirical_density * width;
    fitted_mass += r.fitted_density * width;
  }
  CHECK(mass == Approx(1.0).epsilon(1e-9));
  CHECK(fitted_mass == Approx(1.0).epsilon(0.05));  // tails are truncated
}

TEST_CASE("histogram edge cases") {
  std::vector<double> uniform = {4.0, 4.0, 4.0, 4.0};
  CHECK_THROWS(scaling::histogram_lognormal(uniform, 1));
  auto rows = scaling::histogram_lognormal(uniform, 5);
  REQUIRE(rows.size() == 5);
  int nonzero = 0;
  for (const auto& r : rows) nonzero += r.empirical_density > 0;
  CHECK(nonzero == 1);  // all mass in a single bin
}

TEST_SUITE_END();
