#pragma once

// Design-space sweep over (domain, N, B, M) and its artifacts: CSV tables
// and SVG plots of energy, throughput and area per MAC.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdvmm/analog_model.hpp"
#include "tdvmm/cell_model.hpp"
#include "tdvmm/chain_model.hpp"
#include "tdvmm/digital_model.hpp"
#include "tdvmm/tdc_model.hpp"

namespace tdvmm {

enum class Domain { kTd, kAnalog, kDigital };

std::string to_string(Domain d);
Domain parse_domain(const std::string& s);
std::string to_string(BudgetMode m);
BudgetMode parse_mode(const std::string& s);

// Tolerated output noise per cell bit width, from network noise-injection
// experiments (1% relative accuracy drop).
std::map<int, double> default_sigma_table();

struct FixturePaths {
  std::map<int, std::filesystem::path> cells;  // bit width -> CellSpec JSON
  std::filesystem::path tdc;
  std::filesystem::path analog;
  std::filesystem::path adc_survey;    // CSV; fitted at load time
  std::filesystem::path adc_envelope;  // or a pre-fitted envelope JSON
  std::filesystem::path digital;
};

struct SweepConfig {
  std::vector<Domain> domains{Domain::kTd, Domain::kAnalog, Domain::kDigital};
  std::vector<int> n_values;
  std::vector<int> b_values{1, 2, 3, 4};
  int m = 8;
  BudgetMode mode = BudgetMode::kRelaxed;
  std::map<int, double> sigma_table = default_sigma_table();
  FixturePaths fixtures;
  int clip_bits = 0;
  double weight_density = 0.3;  // P(w = 1); 70% zero weight bits
  double adc_min_rate = 1e6;    // [Hz]
  int redundancy_cap = kDefaultRedundancyCap;
  int threads = 0;

  // Budget applied to B-bit points.
  ErrorBudget budget_for(int b) const;
  void validate() const;
};

// JSON config; fixture paths are resolved relative to the file's directory.
SweepConfig load_sweep_config(const std::filesystem::path& path);
SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir);

// Parses "16:4096:log2" (doubling), "16:64:8" (arithmetic step) or a comma list.
std::vector<int> parse_int_range(const std::string& spec);

struct Fixtures {
  std::map<int, CellSpec> cells;
  std::optional<TdcParams> tdc;
  std::optional<AnalogParams> analog;
  std::optional<AdcEnvelope> adc;
  std::optional<DigitalTable> digital;
};

// Loads the fixtures required by cfg.domains. Missing files raise ConfigError.
Fixtures load_fixtures(const SweepConfig& cfg);

enum class TdcKind { kNone, kHybrid, kSar };
std::string to_string(TdcKind k);

struct SweepRow {
  Domain domain = Domain::kTd;
  int n = 0;
  int b = 0;
  int m = 0;
  BudgetMode mode = BudgetMode::kRelaxed;
  bool feasible = true;
  std::string status = "ok";  // failing constraint for infeasible points

  double energy_per_mac = 0.0;  // [J]
  double throughput = 0.0;      // [MAC/s]
  double area_per_mac = 0.0;    // [m^2]
  int r = 1;
  std::optional<double> enob;
  std::optional<std::int64_t> l_osc;
  TdcKind tdc = TdcKind::kNone;
  std::optional<double> e_tdc_hybrid;  // [J per conversion]
  std::optional<double> e_tdc_sar;     // [J per conversion]
  std::optional<std::int64_t> max_in;
  int clip_bits = 0;
  double mu_chain = 0.0;  // reported, excluded from the budget
  double sigma_achieved = 0.0;
  double sigma_budget = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (domain, n, b, m, clip_bits)

  std::size_t feasible_count() const;
};

SweepRow evaluate_point(const SweepConfig& cfg, const Fixtures& fx, Domain domain, int n, int b,
                        int m, int clip_bits);

SweepResult run_sweep(const SweepConfig& cfg, const Fixtures& fx);
SweepResult run_sweep(const SweepConfig& cfg);

// Chain-splitting study around the 3x3x64 convolution kernel: (576, M=8,
// clip 0), (288, 16, 1), (144, 32, 2), for every configured B. Both TDC
// energies are reported on each row.
SweepResult resnet_scenario(const SweepConfig& cfg, const Fixtures& fx);
SweepResult resnet_scenario(const SweepConfig& cfg);

// Row order is normalized before writing. Throws EmptySelectionError for an
// empty result and IoError on write failures.
std::string sweep_csv_header();
std::string format_sweep_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult parse_sweep_csv(const std::string& text);
SweepResult read_sweep_csv(const std::filesystem::path& path);

enum class PlotKind { kEnergy, kThroughput, kArea };
PlotKind parse_plot_kind(const std::string& s);
std::string to_string(PlotKind k);

// Log-log SVG with one polyline per (domain, b) over the feasible rows.
std::string render_plot(const SweepResult& result, PlotKind kind);
void emit_plot(const SweepResult& result, PlotKind kind, const std::filesystem::path& path);

}  // namespace tdvmm
