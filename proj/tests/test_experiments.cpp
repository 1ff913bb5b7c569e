#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "prefsim/errors.hpp"
#include "prefsim/experiments.hpp"

using namespace prefsim;

namespace {

ExperimentConfig small_config(Algorithm algorithm) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  c.data_grid = {50, 200, 800};
  c.m2_grid = {10, 100, 1000};
  c.num_data = 2000;
  c.num_seeds = 8;
  c.master_seed = 7;
  return c;
}

std::string field_of(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

double multinomial3(std::size_t n, std::size_t a, std::size_t b) {
  return oracle::binomial_coefficient(n, a) * oracle::binomial_coefficient(n - a, b);
}

}  // namespace

TEST(ExperimentConfig, DefaultsAreValid) {
  EXPECT_NO_THROW(ExperimentConfig{}.validate());
  EXPECT_EQ(parse_algorithm("slic"), Algorithm::kSlic);
  EXPECT_EQ(to_string(Algorithm::kDpo), "dpo");
  EXPECT_THROW(parse_algorithm("ppo"), ConfigError);
}

TEST(ExperimentConfig, NamesTheOffendingField) {
  auto c = ExperimentConfig{};
  c.base_mass1 = 1.0;
  EXPECT_EQ(field_of(c), "base-mass1");
  c = ExperimentConfig{};
  c.p1 = 0.0;
  EXPECT_EQ(field_of(c), "p1");
  c = ExperimentConfig{};
  c.pool_m1 = 0;
  EXPECT_EQ(field_of(c), "pool-m1");
  c = ExperimentConfig{};
  c.set_size = 1;
  EXPECT_EQ(field_of(c), "set-size");
  c = ExperimentConfig{};
  c.beta = 0.0;
  EXPECT_EQ(field_of(c), "beta");
  c.algorithm = Algorithm::kIl;
  EXPECT_EQ(field_of(c), "");
  c = ExperimentConfig{};
  c.algorithm = Algorithm::kSlic;
  c.set_size = 3;
  EXPECT_EQ(field_of(c), "set-size");
  c = ExperimentConfig{};
  c.data_grid = {100, 100};
  EXPECT_EQ(field_of(c), "data-grid");
  c = ExperimentConfig{};
  c.num_seeds = 0;
  EXPECT_EQ(field_of(c), "seeds");
  c = ExperimentConfig{};
  c.tol = -1.0;
  EXPECT_EQ(field_of(c), "tol");
}

TEST(ConfigHash, IgnoresThreadsAndTracksResults) {
  auto a = small_config(Algorithm::kRlpo);
  auto b = a;
  b.threads = 4;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.beta = 2.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_NE(resolved_config(a).find("data-grid=50,200,800"), std::string::npos);
}

TEST(Sweep, SerialAndParallelAreByteIdentical) {
  for (auto alg : {Algorithm::kRlpo, Algorithm::kDpo, Algorithm::kIl, Algorithm::kSlic}) {
    auto c = small_config(alg);
    if (alg == Algorithm::kIl) c.beta = 0.01;
    const auto serial = curve_to_csv(run_sweep(c), config_hash(c));
    c.threads = 3;
    const auto parallel = curve_to_csv(run_sweep(c), config_hash(c));
    EXPECT_EQ(serial, parallel) << to_string(alg);
    EXPECT_EQ(serial, curve_to_csv(run_sweep(c), config_hash(c)));
  }
}

TEST(Sweep, CsvSchemaAndOrdering) {
  auto c = small_config(Algorithm::kRlpo);
  c.data_grid = {800, 50, 200};
  const auto curve = run_sweep(c);
  EXPECT_EQ(curve.sweep_name, "num_data");
  ASSERT_EQ(curve.rows.size(), 3u);
  EXPECT_EQ(curve.rows[0].sweep_value, 50.0);
  EXPECT_EQ(curve.rows[2].sweep_value, 800.0);
  const auto csv = curve_to_csv(curve, config_hash(c));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "sweep_value,mean_p_m1,stderr_p_m1,n_seeds,minimizer_exists_rate,config_hash");
  std::ostringstream meta;
  write_metadata(meta, c, curve);
  EXPECT_NE(meta.str().find("config-hash=" + config_hash(c)), std::string::npos);
  EXPECT_NE(meta.str().find("software-version="), std::string::npos);
}

TEST(Sweep, SinglePointRerunReproducesRow) {
  const auto c = small_config(Algorithm::kDpo);
  const auto curve = run_sweep(c);
  auto single = c;
  single.data_grid = {200};
  const auto one = run_sweep(single);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.rows[0].mean_p_m1, curve.rows[1].mean_p_m1);
  EXPECT_EQ(one.rows[0].stderr_p_m1, curve.rows[1].stderr_p_m1);
}

TEST(Sweep, RunPointMatchesSummary) {
  const auto c = small_config(Algorithm::kRlpo);
  const auto point = run_point(c, 200, c.pool_m2, 200);
  ASSERT_EQ(point.p_m1.size(), c.num_seeds);
  const auto row = summarize(200.0, point);
  double mean = 0.0;
  for (double p : point.p_m1) mean += p;
  mean /= static_cast<double>(point.p_m1.size());
  EXPECT_NEAR(row.mean_p_m1, mean, 1e-15);
  EXPECT_EQ(row.n_seeds, c.num_seeds);
  EXPECT_EQ(run_sweep_points(c)[1].p_m1, point.p_m1);
}

TEST(Sweep, SymmetricSetup) {
  auto c = small_config(Algorithm::kIl);
  c.pool_m1 = 50;
  c.m2_grid = {50};
  c.base_mass1 = 0.5;
  c.p1 = 0.5;
  c.beta = 0.01;
  c.num_data = 20000;
  c.num_seeds = 20;
  EXPECT_NEAR(run_sweep(c).rows[0].mean_p_m1, 0.5, 0.02);
  // The SLiC hinge derivative is I1 - I2 between the margins, so each seed sits on a margin kink.
  c.algorithm = Algorithm::kSlic;
  const auto point = run_point(c, c.num_data, 50, 50);
  const double inner = 1.0 / (1.0 + std::exp(c.delta));
  for (double p : point.p_m1) {
    EXPECT_NEAR(std::min(std::abs(p - inner), std::abs(p - (1.0 - inner))), 0.0, 1e-6) << p;
  }
}

TEST(Sweep, SlicDecreasesForSeveralMargins) {
  for (double delta : {0.1, 1.0}) {
    auto c = small_config(Algorithm::kSlic);
    c.delta = delta;
    c.m2_grid = {10, 100, 1000, 10000};
    const auto curve = run_sweep(c);
    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
      EXPECT_LT(curve.rows[i].mean_p_m1, curve.rows[i - 1].mean_p_m1) << "delta=" << delta;
    }
  }
}

TEST(TheoryCheck, PredictionsAndValidation) {
  auto c = small_config(Algorithm::kRlpo);
  c.data_grid = {100};
  c.num_seeds = 4;
  const auto report = run_theory_check(c, 2, 5);
  ASSERT_EQ(report.predictions.size(), 4u);
  EXPECT_FALSE(report.predictions[0].condition_holds);
  EXPECT_TRUE(report.predictions[2].condition_holds);
  EXPECT_TRUE(std::isnan(report.events[0].eta));
  EXPECT_TRUE(std::isnan(report.events[0].eta_event_rate));
  EXPECT_FALSE(std::isnan(report.events[2].eta_event_rate));
  const auto text = format_theory_report(report);
  EXPECT_NE(text.find("2,0.5,false,prefer_M1"), std::string::npos) << text;
  EXPECT_NE(text.find(",na,na,"), std::string::npos);
  EXPECT_THROW(run_theory_check(c, 1, 3), ConfigError);
  EXPECT_THROW(run_theory_check(c, 4, 3), ConfigError);
}

TEST(TheoryCheck, EtaEventFrequencyMatchesEnumeration) {
  auto c = small_config(Algorithm::kRlpo);
  c.data_grid = {2};
  c.num_seeds = 20000;
  const auto report = run_theory_check(c, 4, 4);
  const double eta = report.events[0].eta;
  ASSERT_GT(eta, 0.0);
  double expected = 0.0;
  const auto draws = oracle::enumerate_single_draw(0.8, 0.6, 4);
  for (const auto& a : draws) {
    for (const auto& b : draws) {
      const double rho_data = static_cast<double>(a.n1 + b.n1) / 8.0;
      const double rho_chosen = ((a.chosen == 1) + (b.chosen == 1)) / 2.0;
      if (rho_chosen > 0.0 && rho_data - rho_chosen > eta) expected += a.probability * b.probability;
    }
  }
  const double se = std::sqrt(expected * (1.0 - expected) / 20000.0);
  EXPECT_NEAR(report.events[0].eta_event_rate, expected, 3.5 * se);
}

TEST(TheoryCheck, IlEventFrequencyMatchesEnumeration) {
  auto c = small_config(Algorithm::kIl);
  c.beta = 0.01;
  c.data_grid = {6};
  c.num_seeds = 20000;
  const auto report = run_theory_check(c, 2, 2);
  // Per record: mixed and chose M1, mixed and chose M2, or homogeneous.
  const double a = 0.32 * 0.6, b = 0.32 * 0.4, h = 0.68;
  double expected = 0.0;
  for (std::size_t i1 = 2; i1 <= 6; ++i1) {
    for (std::size_t i2 = 2; i1 + i2 <= 6; ++i2) {
      expected += multinomial3(6, i1, i2) * std::pow(a, i1) * std::pow(b, i2) * std::pow(h, 6 - i1 - i2);
    }
  }
  const double se = std::sqrt(expected * (1.0 - expected) / 20000.0);
  EXPECT_NEAR(report.events[0].il_event_rate, expected, 3.5 * se);
}
