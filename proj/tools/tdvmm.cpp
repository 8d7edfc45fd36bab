// tdvmm: design-space explorer for time-domain, analog and digital VMM arrays.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tdvmm/analog_model.hpp"
#include "tdvmm/errors.hpp"
#include "tdvmm/explorer.hpp"
#include "tdvmm/mc_oracle.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;

struct SweepOverrides {
  std::string config;
  std::string domains;
  std::string n;
  std::string bits;
  int m = 0;
  std::string mode;
  double weight_density = -1.0;
  int clip_bits = -1;
  int threads = -1;
  std::string out;
  std::string plot;
  std::string plot_kind = "energy";
};

tdvmm::SweepConfig build_config(const SweepOverrides& o) {
  tdvmm::SweepConfig cfg = tdvmm::load_sweep_config(o.config);
  if (!o.domains.empty()) {
    cfg.domains.clear();
    std::stringstream ss(o.domains);
    for (std::string d; std::getline(ss, d, ',');) cfg.domains.push_back(tdvmm::parse_domain(d));
  }
  if (!o.n.empty()) cfg.n_values = tdvmm::parse_int_range(o.n);
  if (!o.bits.empty()) cfg.b_values = tdvmm::parse_int_range(o.bits);
  if (o.m > 0) cfg.m = o.m;
  if (!o.mode.empty()) cfg.mode = tdvmm::parse_mode(o.mode);
  if (o.weight_density >= 0.0) cfg.weight_density = o.weight_density;
  if (o.clip_bits >= 0) cfg.clip_bits = o.clip_bits;
  if (o.threads >= 0) cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

void add_sweep_options(CLI::App* cmd, SweepOverrides& o, bool full) {
  cmd->add_option("--config", o.config, "sweep config JSON")->required()->check(CLI::ExistingFile);
  if (full) {
    cmd->add_option("--domains", o.domains, "comma list of td, analog, digital");
    cmd->add_option("--n", o.n, "array dimensions, e.g. 16:4096:log2 or 64,576");
    cmd->add_option("--m", o.m, "parallel chains sharing the converter periphery");
    cmd->add_option("--clip-bits", o.clip_bits, "TDC range reduction in bits");
  }
  cmd->add_option("--bits", o.bits, "cell bit widths, e.g. 1,2,3,4");
  cmd->add_option("--mode", o.mode, "precise or relaxed");
  cmd->add_option("--weight-density", o.weight_density, "probability of a one weight bit");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--plot", o.plot, "SVG output path");
  cmd->add_option("--plot-kind", o.plot_kind, "energy, throughput or area");
}

int finish(const tdvmm::SweepResult& result, const SweepOverrides& o) {
  if (o.out.empty()) {
    std::cout << tdvmm::format_sweep_csv(result);
  } else {
    tdvmm::emit_csv(result, o.out);
  }
  if (!o.plot.empty() && result.feasible_count() > 0) {
    tdvmm::emit_plot(result, tdvmm::parse_plot_kind(o.plot_kind), o.plot);
  }
  std::cerr << result.feasible_count() << " of " << result.rows.size() << " points feasible\n";
  return result.feasible_count() == 0 ? kExitInfeasible : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy, area and throughput explorer for TD, analog and digital VMM arrays"};
  app.require_subcommand(1);

  SweepOverrides explore_opts;
  auto* explore = app.add_subcommand("explore", "sweep (domain x N x B) and emit a CSV table");
  add_sweep_options(explore, explore_opts, true);

  SweepOverrides scenario_opts;
  auto* scenario = app.add_subcommand("scenario", "predefined studies");
  scenario->require_subcommand(1);
  auto* resnet = scenario->add_subcommand("resnet", "576-long chain split into 288 and 144");
  add_sweep_options(resnet, scenario_opts, false);

  std::string survey, envelope_out;
  double min_rate = 1e6;
  auto* fit = app.add_subcommand("fit-adc", "fit the ADC energy and throughput envelope to a survey");
  fit->add_option("--survey", survey, "ADC survey CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--min-rate", min_rate, "minimum sample rate [Hz]");
  fit->add_option("--out", envelope_out, "envelope JSON path (default: stdout)");

  std::string cell_path, samples_out, mismatch = "static";
  tdvmm::MonteCarloConfig mc;
  double pw = 0.3;
  auto* oracle = app.add_subcommand("oracle", "Monte-Carlo chain error vs. the analytic statistics");
  oracle->add_option("--cell", cell_path, "cell spec JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--trials", mc.trials, "number of trials")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", mc.seed, "RNG seed");
  oracle->add_option("--n", mc.n, "chain length")->check(CLI::PositiveNumber);
  oracle->add_option("--r", mc.r, "redundancy")->check(CLI::PositiveNumber);
  oracle->add_option("--weight-density", pw, "probability of a one weight bit");
  oracle->add_option("--mismatch", mismatch, "static or fresh")
      ->check(CLI::IsMember({"static", "fresh"}));
  oracle->add_option("--evals-per-instance", mc.evaluations_per_instance,
                     "trials sharing one chain instance (static mode)");
  oracle->add_option("--threads", mc.threads, "worker threads (0 = all cores)");
  oracle->add_option("--samples", samples_out, "raw sample CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*explore) {
      const auto cfg = build_config(explore_opts);
      return finish(tdvmm::run_sweep(cfg), explore_opts);
    }
    if (*resnet) {
      const auto cfg = build_config(scenario_opts);
      return finish(tdvmm::resnet_scenario(cfg), scenario_opts);
    }
    if (*fit) {
      const auto env = tdvmm::fit_adc_envelope(tdvmm::read_adc_survey(survey), min_rate);
      if (envelope_out.empty()) {
        std::cout << tdvmm::adc_envelope_to_json(env) << '\n';
      } else {
        tdvmm::write_adc_envelope(env, envelope_out);
      }
      return 0;
    }
    if (*oracle) {
      const auto spec = tdvmm::load_cell_spec(cell_path);
      const auto dist = tdvmm::InputDistribution::uniform(spec.bit_width, pw);
      mc.inputs = dist;
      mc.mismatch = mismatch == "fresh" ? tdvmm::MismatchMode::kFresh : tdvmm::MismatchMode::kStatic;
      const auto samples = tdvmm::simulate_chain_samples(spec, mc);
      const auto emp = tdvmm::summarize(samples, mc.histogram_bins);
      const auto ref = tdvmm::chain_stats(tdvmm::cell_error_stats(spec, dist), mc.n, mc.r);
      std::printf("trials           %lld\n", static_cast<long long>(emp.trials));
      std::printf("mean             %.6g steps (analytic %.6g, sem %.3g)\n", emp.mean, ref.mu, emp.sem);
      std::printf("variance         %.6g steps^2 (analytic %.6g, rel. dev. %+.3f%%)\n", emp.variance,
                  ref.variance, 100.0 * (emp.variance / ref.variance - 1.0));
      std::printf("skewness         %.4f\n", emp.skewness);
      if (!samples_out.empty()) tdvmm::write_samples_csv(samples, samples_out);
      return 0;
    }
  } catch (const tdvmm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tdvmm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
