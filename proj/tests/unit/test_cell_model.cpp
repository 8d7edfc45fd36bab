#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "tdvmm/cell_model.hpp"
#include "tdvmm/errors.hpp"

using namespace tdvmm;
using testing_helpers::make_cell;

namespace {

// Brute-force enumeration of the joint (x, w) law: mean, E[var], Var(mean)
// through explicit E[INL^2] - E[INL]^2.
CellErrorStats enumerate(const CellSpec& s, const InputDistribution& d) {
  long double m1 = 0, m2 = 0, ev = 0;
  for (std::size_t x = 0; x < d.px.size(); ++x) {
    for (std::size_t w = 0; w < d.pw_levels.size(); ++w) {
      const long double p = static_cast<long double>(d.px[x]) * d.pw_levels[w];
      m1 += p * s.inl(x, w);
      m2 += p * s.inl(x, w) * s.inl(x, w);
      ev += p * s.sigma(x, w) * s.sigma(x, w);
    }
  }
  return {static_cast<double>(m1), static_cast<double>(ev), static_cast<double>(m2 - m1 * m1)};
}

}  // namespace

TEST(CellStats, MatchesEnumerationOnRandomCells) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pw(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const int b = 1 + i % 4;
    const auto cell = testing_helpers::random_cell(rng, b);
    const auto dist = InputDistribution::uniform(b, pw(rng));
    const auto got = cell_error_stats(cell, dist);
    const auto ref = enumerate(cell, dist);
    EXPECT_NEAR(got.mu, ref.mu, 1e-15);
    EXPECT_NEAR(got.evpv, ref.evpv, 1e-15);
    EXPECT_NEAR(got.vhm, ref.vhm, 1e-14);
    EXPECT_GE(got.vhm, 0.0);
  }
}

TEST(CellStats, ZeroTablesGiveZeroStats) {
  const auto cell = make_cell(2, [](int, int) { return 0.0; }, [](int, int) { return 0.0; });
  const auto s = cell_error_stats(cell, InputDistribution::uniform(2, 0.3));
  EXPECT_EQ(s.mu, 0.0);
  EXPECT_EQ(s.evpv, 0.0);
  EXPECT_EQ(s.vhm, 0.0);
}

TEST(CellStats, ConstantInlHasExactlyZeroVhm) {
  const auto cell = make_cell(3, [](int, int) { return 0.1; }, [](int, int) { return 0.02; });
  const auto s = cell_error_stats(cell, InputDistribution::uniform(3, 0.37));
  EXPECT_DOUBLE_EQ(s.mu, 0.1);
  EXPECT_EQ(s.vhm, 0.0);
  EXPECT_DOUBLE_EQ(s.evpv, 0.0004);
}

TEST(CellStats, NonzeroMeanUsesVarianceNotSecondMoment) {
  // INL 0 for w=0, 0.2 for w=1 at pw=0.5: variance 0.01, second moment 0.02.
  const auto cell = make_cell(1, [](int, int w) { return 0.2 * w; }, [](int, int) { return 0.0; });
  const auto s = cell_error_stats(cell, InputDistribution::uniform(1, 0.5));
  EXPECT_NEAR(s.vhm, 0.01, 1e-15);
  EXPECT_NEAR(s.mu, 0.1, 1e-15);
}

TEST(CellStats, SingularDistributionHasNoVhm) {
  const auto cell = make_cell(1, [](int x, int w) { return 0.1 * x + 0.3 * w; },
                              [](int, int) { return 0.05; });
  const auto s = cell_error_stats(cell, InputDistribution::binary({0.0, 1.0}, 1.0));
  EXPECT_DOUBLE_EQ(s.mu, 0.4);
  EXPECT_EQ(s.vhm, 0.0);
}

TEST(CellStats, RejectsMismatchedDistribution) {
  const auto cell = make_cell(2, [](int, int) { return 0.0; }, [](int, int) { return 0.0; });
  EXPECT_THROW(cell_error_stats(cell, InputDistribution::uniform(1, 0.3)), ConfigError);
  EXPECT_THROW(cell_error_stats(cell, InputDistribution::binary({0.5, 0.2, 0.2, 0.2}, 0.3)),
               ConfigError);
}

TEST(Redundancy, ScalingLaws) {
  const CellErrorStats s{0.3, 0.02, 0.05};
  const auto r4 = scale_with_redundancy(s, 4);
  EXPECT_DOUBLE_EQ(r4.mu, 0.075);
  EXPECT_DOUBLE_EQ(r4.evpv, 0.005);
  EXPECT_DOUBLE_EQ(r4.vhm, 0.05 / 16);
  const auto r1 = scale_with_redundancy(s, 1);
  EXPECT_EQ(r1.mu, s.mu);
  EXPECT_EQ(r1.evpv, s.evpv);
  EXPECT_EQ(r1.vhm, s.vhm);
  EXPECT_THROW(scale_with_redundancy(s, 0), DomainError);
}

TEST(Esnr, Definition) {
  EXPECT_DOUBLE_EQ(esnr(10.0, 4.0), 5.0);
  // Cascading R cells: SNR * sqrt(R), energy * R.
  EXPECT_NEAR(esnr(10.0 * std::sqrt(9.0), 4.0 * 9.0), esnr(10.0, 4.0), 1e-12);
  EXPECT_THROW(esnr(1.0, 0.0), DomainError);
}

TEST(CellSpecIo, LoadsShippedFixtures) {
  for (int b = 1; b <= 4; ++b) {
    const auto s = load_cell_spec(testing_helpers::data_dir() / "cells" / ("cell_b" + std::to_string(b) + ".json"));
    EXPECT_EQ(s.bit_width, b);
    EXPECT_EQ(s.inl.x_levels(), std::size_t{1} << b);
    EXPECT_GE(s.d_max, ((1 << b) - 1) * s.d_step);
  }
}

TEST(CellSpecIo, RejectsBadSpecs) {
  const std::string good = R"({"bit_width":1,"inl":[[0,0],[0,0.1]],"sigma":[[0.01,0.01],[0.01,0.02]],
    "e_op_joules":1e-15,"e_op_per_r_joules":5e-16,"d_step_seconds":1e-11,"d_max_seconds":2e-11,
    "cpp_meters":1e-7,"h_cell_meters":5e-7})";
  EXPECT_NO_THROW(parse_cell_spec(good));
  auto with = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_cell_spec(with("\"bit_width\":1", "\"bit_width\":2")), ConfigError);
  EXPECT_THROW(parse_cell_spec(with("[0.01,0.02]", "[0.01,-0.02]")), ConfigError);
  EXPECT_THROW(parse_cell_spec(with("\"d_max_seconds\":2e-11", "\"d_max_seconds\":5e-12")), ConfigError);
  EXPECT_THROW(parse_cell_spec(with("\"e_op_joules\":1e-15,", "")), ConfigError);
  EXPECT_THROW(parse_cell_spec("{not json"), IngestError);
  EXPECT_THROW(load_cell_spec("/nonexistent/cell.json"), ConfigError);
}

TEST(InputDistribution, Validation) {
  EXPECT_THROW(InputDistribution::binary({0.5, 0.6}, 0.3).validate(), ConfigError);
  EXPECT_THROW(InputDistribution::binary({0.5, 0.5}, 1.3).validate(), ConfigError);
  const auto u = InputDistribution::uniform(3, 0.3);
  EXPECT_EQ(u.px.size(), 8u);
  EXPECT_DOUBLE_EQ(u.weight_density(), 0.3);
}
