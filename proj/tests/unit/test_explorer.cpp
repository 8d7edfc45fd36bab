#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

#include "helpers.hpp"
#include "tdvmm/errors.hpp"
#include "tdvmm/explorer.hpp"

using namespace tdvmm;

namespace {

SweepConfig default_config() { return load_sweep_config(testing_helpers::data_dir() / "default_config.json"); }

const Fixtures& fixtures() {
  static const Fixtures fx = load_fixtures(default_config());
  return fx;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, ParsesDefaultFile) {
  const auto cfg = default_config();
  EXPECT_EQ(cfg.domains.size(), 3u);
  EXPECT_EQ(cfg.n_values.front(), 16);
  EXPECT_EQ(cfg.n_values.back(), 4096);
  EXPECT_EQ(cfg.n_values.size(), 9u);
  EXPECT_EQ(cfg.m, 8);
  EXPECT_EQ(cfg.mode, BudgetMode::kRelaxed);
  EXPECT_DOUBLE_EQ(cfg.sigma_table.at(4), 2.85);
  EXPECT_TRUE(std::filesystem::exists(cfg.fixtures.cells.at(1)));
}

TEST(Config, IntRanges) {
  EXPECT_EQ(parse_int_range("16:128:log2"), (std::vector<int>{16, 32, 64, 128}));
  EXPECT_EQ(parse_int_range("10:30:10"), (std::vector<int>{10, 20, 30}));
  EXPECT_EQ(parse_int_range("1,2,4"), (std::vector<int>{1, 2, 4}));
  EXPECT_THROW(parse_int_range("a:b"), ConfigError);
  EXPECT_THROW(parse_int_range("64:16:log2"), ConfigError);
  EXPECT_THROW(parse_int_range(""), ConfigError);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_sweep_config(R"({"domains":["quantum"]})", "."), ConfigError);
  EXPECT_THROW(parse_sweep_config(R"({"domains":[]})", "."), ConfigError);
  EXPECT_THROW(parse_sweep_config(R"({"mode":"relaxed","sigma_table":{"1":0.5},"b_values":[1,2]})", "."),
               ConfigError);
  EXPECT_THROW(load_sweep_config("/nonexistent/config.json"), ConfigError);
  auto cfg = parse_sweep_config(R"({"domains":["digital"],"fixtures":{"digital":"missing.csv"}})", "/tmp");
  EXPECT_THROW(load_fixtures(cfg), ConfigError);
  cfg = parse_sweep_config(R"({"domains":["td"]})", "/tmp");
  EXPECT_THROW(load_fixtures(cfg), ConfigError);
}

TEST(Sweep, DigitalPointEqualsTable) {
  const auto cfg = default_config();
  const auto row = evaluate_point(cfg, fixtures(), Domain::kDigital, 64, 2, 8, 0);
  ASSERT_TRUE(row.feasible);
  EXPECT_EQ(row.energy_per_mac, fixtures().digital->energy_per_mac(64, 2));
  EXPECT_EQ(row.throughput, 64.0 * 8 * 1e9);
  const auto off = evaluate_point(cfg, fixtures(), Domain::kDigital, 8192, 2, 8, 0);
  EXPECT_FALSE(off.feasible);
  EXPECT_EQ(off.status, "outside_digital_grid");
}

TEST(Sweep, RelaxedNeedsNoMoreRedundancyThanPrecise) {
  auto relaxed = default_config();
  auto precise = relaxed;
  precise.mode = BudgetMode::kPrecise;
  for (int n : relaxed.n_values) {
    for (int b : relaxed.b_values) {
      const auto a = evaluate_point(relaxed, fixtures(), Domain::kTd, n, b, 8, 0);
      const auto p = evaluate_point(precise, fixtures(), Domain::kTd, n, b, 8, 0);
      ASSERT_TRUE(a.feasible && p.feasible);
      EXPECT_LE(a.r, p.r);
      if (a.r != p.r) EXPECT_GT(p.energy_per_mac, a.energy_per_mac);
    }
  }
}

TEST(Sweep, TighterBudgetRaisesEnergyWhenRedundancyChanges) {
  auto cfg = default_config();
  cfg.domains = {Domain::kTd};
  double prev_energy = 0.0;
  int prev_r = 0;
  for (double s : {2.0, 1.0, 0.5, 0.25, 0.1}) {
    cfg.sigma_table[2] = s;
    const auto row = evaluate_point(cfg, fixtures(), Domain::kTd, 1024, 2, 8, 0);
    ASSERT_TRUE(row.feasible);
    if (prev_r != 0 && row.r != prev_r) EXPECT_GT(row.energy_per_mac, prev_energy);
    prev_r = row.r;
    prev_energy = row.energy_per_mac;
  }
}

TEST(Sweep, RowsMeetBudgetAndArePositive) {
  const auto cfg = default_config();
  const auto res = run_sweep(cfg, fixtures());
  EXPECT_EQ(res.rows.size(), 3u * 9u * 4u);
  for (const auto& row : res.rows) {
    if (!row.feasible) continue;
    EXPECT_LE(row.sigma_achieved, row.sigma_budget);
    EXPECT_GT(row.energy_per_mac, 0.0);
    EXPECT_GT(row.throughput, 0.0);
    EXPECT_GT(row.area_per_mac, 0.0);
    EXPECT_GE(row.r, 1);
    if (row.domain == Domain::kTd) {
      ASSERT_TRUE(row.e_tdc_hybrid && row.e_tdc_sar && row.l_osc);
      EXPECT_NE(row.tdc, TdcKind::kNone);
    }
    if (row.domain == Domain::kAnalog) EXPECT_TRUE(row.enob.has_value());
  }
}

TEST(Sweep, OrderIndependent) {
  auto cfg = default_config();
  cfg.threads = 1;
  const auto a = format_sweep_csv(run_sweep(cfg, fixtures()));
  std::reverse(cfg.n_values.begin(), cfg.n_values.end());
  std::reverse(cfg.b_values.begin(), cfg.b_values.end());
  std::reverse(cfg.domains.begin(), cfg.domains.end());
  cfg.threads = 3;
  EXPECT_EQ(format_sweep_csv(run_sweep(cfg, fixtures())), a);
}

TEST(Sweep, InfeasiblePointsAreReported) {
  auto cfg = default_config();
  cfg.domains = {Domain::kTd};
  cfg.redundancy_cap = 1;
  cfg.mode = BudgetMode::kPrecise;
  const auto res = run_sweep(cfg, fixtures());
  EXPECT_EQ(res.rows.size(), 36u);
  EXPECT_GT(res.feasible_count(), 0u);
  EXPECT_LT(res.feasible_count(), res.rows.size());
  for (const auto& row : res.rows) {
    if (!row.feasible) EXPECT_EQ(row.status, "redundancy_cap_exceeded");
  }
  const auto csv = format_sweep_csv(res);
  EXPECT_NE(csv.find("redundancy_cap_exceeded"), std::string::npos);
}

TEST(Scenario, ResnetRowsCarryBothTdcEnergies) {
  const auto res = resnet_scenario(default_config(), fixtures());
  EXPECT_EQ(res.rows.size(), 12u);
  bool base = false;
  for (const auto& row : res.rows) {
    ASSERT_TRUE(row.e_tdc_hybrid && row.e_tdc_sar);
    if (row.n == 576) {
      EXPECT_EQ(row.m, 8);
      EXPECT_EQ(row.clip_bits, 0);
      base = true;
    }
    if (row.n == 288) EXPECT_EQ(row.m, 16);
    if (row.n == 144) EXPECT_EQ(row.clip_bits, 2);
  }
  EXPECT_TRUE(base);
}

TEST(Csv, HeaderSchema) {
  EXPECT_EQ(sweep_csv_header(),
            "domain,n,b,m,mode,clip_bits,status,energy_per_mac_joules,throughput_mac_per_s,"
            "area_per_mac_m2,r,enob,l_osc,tdc,e_tdc_hybrid_joules,e_tdc_sar_joules,max_in,"
            "mu_chain_steps,sigma_achieved_steps,sigma_budget_steps");
}

TEST(Csv, SingleRowIsTwoLines) {
  SweepResult r;
  r.rows.push_back(evaluate_point(default_config(), fixtures(), Domain::kTd, 64, 1, 8, 0));
  const auto text = format_sweep_csv(r);
  EXPECT_EQ(count(text, "\n"), 2u);
  EXPECT_EQ(text.substr(0, text.find('\n')), sweep_csv_header());
}

TEST(Csv, RoundTripIsByteIdentical) {
  auto cfg = default_config();
  cfg.mode = BudgetMode::kPrecise;
  const auto res = run_sweep(cfg, fixtures());
  ASSERT_LT(res.feasible_count(), res.rows.size());
  const auto text = format_sweep_csv(res);
  const auto back = parse_sweep_csv(text);
  EXPECT_EQ(format_sweep_csv(back), text);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].energy_per_mac, res.rows[i].energy_per_mac);
    EXPECT_EQ(back.rows[i].sigma_achieved, res.rows[i].sigma_achieved);
  }
  const auto path = std::filesystem::temp_directory_path() / "tdvmm_roundtrip.csv";
  emit_csv(res, path);
  EXPECT_EQ(slurp(path), text);
  EXPECT_EQ(format_sweep_csv(read_sweep_csv(path)), text);
  std::filesystem::remove(path);
}

TEST(Csv, Errors) {
  EXPECT_THROW(format_sweep_csv(SweepResult{}), EmptySelectionError);
  SweepResult r;
  r.rows.push_back(evaluate_point(default_config(), fixtures(), Domain::kTd, 64, 1, 8, 0));
  EXPECT_THROW(emit_csv(r, "/nonexistent/dir/out.csv"), IoError);
  EXPECT_THROW(parse_sweep_csv("domain,n\ntd,1\n"), IngestError);
  auto bad = r;
  bad.rows[0].sigma_achieved = bad.rows[0].sigma_budget * 2;
  EXPECT_THROW(format_sweep_csv(bad), Error);
}

TEST(Plot, OnePolylinePerSeries) {
  const auto res = run_sweep(default_config(), fixtures());
  for (auto kind : {PlotKind::kEnergy, PlotKind::kThroughput, PlotKind::kArea}) {
    const auto svg = render_plot(res, kind);
    EXPECT_EQ(count(svg, "<polyline"), 12u);
    EXPECT_EQ(count(svg, "data-domain=\"td\""), 4u);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(render_plot(res, kind), svg);
  }
}

TEST(Plot, EmptySelectionIsAnError) {
  auto cfg = default_config();
  cfg.domains = {Domain::kDigital};
  cfg.n_values = {8192};
  const auto res = run_sweep(cfg, fixtures());
  ASSERT_EQ(res.feasible_count(), 0u);
  EXPECT_THROW(render_plot(res, PlotKind::kEnergy), EmptySelectionError);
  const auto path = std::filesystem::temp_directory_path() / "tdvmm_empty.svg";
  std::filesystem::remove(path);
  EXPECT_THROW(emit_plot(res, PlotKind::kEnergy, path), EmptySelectionError);
  EXPECT_FALSE(std::filesystem::exists(path));
  EXPECT_THROW(parse_plot_kind("latency"), ConfigError);
}
