#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "tdvmm/chain_model.hpp"
#include "tdvmm/errors.hpp"
#include "tdvmm/mc_oracle.hpp"

using namespace tdvmm;
using testing_helpers::make_cell;

namespace {

MonteCarloConfig sampled(int b, int n, int r, std::int64_t trials, std::uint64_t seed = 3) {
  MonteCarloConfig c;
  c.trials = trials;
  c.seed = seed;
  c.n = n;
  c.r = r;
  c.inputs = InputDistribution::uniform(b, 0.3);
  return c;
}

}  // namespace

TEST(SplitMix, KnownSequenceAndRanges) {
  // Reference values of the SplitMix64 generator seeded with 0.
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g.next(), 0x6e789e6aa1b965f4ULL);
  SplitMix64 u(9);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_NE(SplitMix64::derive(1, 2), SplitMix64::derive(1, 3));
  EXPECT_NE(SplitMix64::derive(1, 2), SplitMix64::derive(2, 2));
}

TEST(SplitMix, NormalMoments) {
  SplitMix64 g(17);
  double s1 = 0, s2 = 0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double v = g.normal();
    s1 += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s1 / count, 0.0, 0.01);
  EXPECT_NEAR(s2 / count, 1.0, 0.01);
}

TEST(Oracle, ZeroCellIsExactlyZero) {
  const auto cell = make_cell(2, [](int, int) { return 0.0; }, [](int, int) { return 0.0; });
  const auto s = simulate_chain(cell, sampled(2, 16, 2, 1000));
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.variance, 0.0);
}

TEST(Oracle, DeterministicAndThreadIndependent) {
  const auto cell = load_cell_spec(testing_helpers::data_dir() / "cells" / "cell_b2.json");
  auto cfg = sampled(2, 32, 2, 5000, 42);
  cfg.threads = 1;
  const auto a = simulate_chain_samples(cell, cfg);
  cfg.threads = 4;
  const auto b = simulate_chain_samples(cell, cfg);
  EXPECT_EQ(a, b);
  cfg.seed = 43;
  EXPECT_NE(a, simulate_chain_samples(cell, cfg));
}

TEST(Oracle, MatchesAnalyticStatistics) {
  std::mt19937_64 rng(8);
  for (int b : {1, 3}) {
    const auto cell = testing_helpers::random_cell(rng, b);
    for (int r : {1, 3}) {
      const auto cfg = sampled(b, 16, r, 100000, 100 + b * 10 + r);
      const auto emp = simulate_chain(cell, cfg);
      const auto ref = chain_stats(cell_error_stats(cell, std::get<InputDistribution>(cfg.inputs)), 16, r);
      EXPECT_NEAR(emp.variance / ref.variance, 1.0, 0.03) << b << ' ' << r;
      EXPECT_NEAR(emp.mean, ref.mu, 5 * emp.sem) << b << ' ' << r;
      EXPECT_NEAR(emp.skewness, 0.0, 0.2);
    }
  }
}

TEST(Oracle, FreshModeMatchesToo) {
  const auto cell = load_cell_spec(testing_helpers::data_dir() / "cells" / "cell_b1.json");
  auto cfg = sampled(1, 64, 2, 50000, 9);
  cfg.mismatch = MismatchMode::kFresh;
  const auto emp = simulate_chain(cell, cfg);
  const auto ref = chain_stats(cell_error_stats(cell, InputDistribution::uniform(1, 0.3)), 64, 2);
  EXPECT_NEAR(emp.variance / ref.variance, 1.0, 0.04);
}

TEST(Oracle, FixedInputs) {
  const auto cell = make_cell(1, [](int x, int w) { return 0.1 * x * w; }, [](int, int) { return 0.05; });
  MonteCarloConfig cfg;
  cfg.trials = 50000;
  cfg.n = 4;
  cfg.r = 2;
  cfg.inputs = FixedInputs{{1, 1, 0, 1}, {1, 0, 1, 1}};
  const auto emp = simulate_chain(cell, cfg);
  EXPECT_NEAR(emp.mean, 0.2 / 2, 5 * emp.sem);
  // Sum of 4 positions, each with variance 2 sigma^2 / r^2.
  EXPECT_NEAR(emp.variance / (4 * 2 * 0.0025 / 4), 1.0, 0.03);
}

TEST(Oracle, StaticInstancesShareOffsets) {
  const auto cell = make_cell(1, [](int, int) { return 0.0; }, [](int, int) { return 0.1; });
  MonteCarloConfig cfg;
  cfg.trials = 1000;
  cfg.n = 8;
  cfg.r = 1;
  cfg.inputs = FixedInputs{std::vector<int>(8, 1), std::vector<int>(8, 1)};
  cfg.evaluations_per_instance = 10;
  const auto s = simulate_chain_samples(cell, cfg);
  for (std::size_t i = 0; i < s.size(); i += 10) {
    for (std::size_t k = 1; k < 10; ++k) EXPECT_EQ(s[i], s[i + k]);
  }
  EXPECT_NE(s[0], s[10]);
  cfg.mismatch = MismatchMode::kFresh;
  const auto f = simulate_chain_samples(cell, cfg);
  EXPECT_NE(f[0], f[1]);
}

TEST(Oracle, InvalidConfig) {
  const auto cell = make_cell(1, [](int, int) { return 0.0; }, [](int, int) { return 0.0; });
  auto cfg = sampled(1, 4, 1, 0);
  EXPECT_THROW(simulate_chain(cell, cfg), ConfigError);
  cfg = sampled(2, 4, 1, 10);
  EXPECT_THROW(simulate_chain(cell, cfg), ConfigError);
  cfg.inputs = FixedInputs{{0, 1}, {0, 1}};
  EXPECT_THROW(simulate_chain(cell, cfg), ConfigError);
}

TEST(Oracle, SampleDump) {
  const auto path = std::filesystem::temp_directory_path() / "tdvmm_samples.csv";
  write_samples_csv({0.5, -0.25}, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "trial,error_delay_steps\n0,0.5\n1,-0.25\n");
  std::filesystem::remove(path);
  EXPECT_THROW(write_samples_csv({1.0}, "/nonexistent/dir/x.csv"), IoError);
}

TEST(Tdc, IntegerReadoutsAreExact) {
  for (std::int64_t max_in : {1, 7, 575, 8640}) {
    const auto range = make_range(max_in);
    for (std::int64_t l : {1, 2, 3, 8, 100}) {
      for (std::int64_t k = 0; k <= max_in; k += std::max<std::int64_t>(1, max_in / 97)) {
        const auto c = simulate_tdc(static_cast<double>(k), range, l);
        EXPECT_EQ(c.code, k);
        EXPECT_FALSE(c.saturated);
      }
      EXPECT_EQ(simulate_tdc(static_cast<double>(max_in), range, l).code, max_in);
    }
  }
}

TEST(Tdc, RandomReadoutsWithinOneStep) {
  std::mt19937_64 rng(4);
  const auto range = make_range(8640);
  std::uniform_real_distribution<double> u(0.0, 8640.0);
  std::uniform_int_distribution<std::int64_t> l(1, 4320);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng);
    const auto c = simulate_tdc(v, range, l(rng));
    EXPECT_LT(std::abs(static_cast<double>(c.code) - v), 1.0);
    EXPECT_EQ(c.code, static_cast<std::int64_t>(std::floor(v)));
  }
}

TEST(Tdc, SaturatesOutOfRange) {
  const auto range = make_range(100);
  auto hi = simulate_tdc(130.2, range, 4);
  EXPECT_TRUE(hi.saturated);
  EXPECT_EQ(hi.code, 100);
  auto lo = simulate_tdc(-3.0, range, 4);
  EXPECT_TRUE(lo.saturated);
  EXPECT_EQ(lo.code, 0);
  EXPECT_THROW(simulate_tdc(1.0, range, 0), DomainError);
}

TEST(Timing, FullScaleDelayAgreesWithLatencyModel) {
  const auto cell = load_cell_spec(testing_helpers::data_dir() / "cells" / "cell_b4.json");
  const auto t = simulate_full_scale_timing(cell, 64, 2, 2000, 1);
  const double ideal = 64 * 2 * cell.d_max;
  const double inl = 64 * cell.inl(15, 1) * cell.d_step;
  EXPECT_NEAR(t.mean, ideal + inl, 0.01 * ideal);
  EXPECT_GE(t.max, t.mean);
  EXPECT_NEAR(td_latency(64, 2, cell, 0.0), ideal, 1e-20);
}
