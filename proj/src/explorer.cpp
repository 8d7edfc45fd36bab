#include "tdvmm/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <tuple>

#include "json_util.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

std::string to_string(Domain d) {
  switch (d) {
    case Domain::kTd:
      return "td";
    case Domain::kAnalog:
      return "analog";
    case Domain::kDigital:
      return "digital";
  }
  return "?";
}

Domain parse_domain(const std::string& s) {
  if (s == "td") return Domain::kTd;
  if (s == "analog") return Domain::kAnalog;
  if (s == "digital") return Domain::kDigital;
  throw ConfigError("unknown domain '" + s + "' (expected td, analog or digital)");
}

std::string to_string(BudgetMode m) { return m == BudgetMode::kPrecise ? "precise" : "relaxed"; }

BudgetMode parse_mode(const std::string& s) {
  if (s == "precise") return BudgetMode::kPrecise;
  if (s == "relaxed") return BudgetMode::kRelaxed;
  throw ConfigError("unknown mode '" + s + "' (expected precise or relaxed)");
}

std::string to_string(TdcKind k) {
  switch (k) {
    case TdcKind::kHybrid:
      return "hybrid";
    case TdcKind::kSar:
      return "sar";
    case TdcKind::kNone:
      break;
  }
  return "none";
}

std::map<int, double> default_sigma_table() { return {{1, 0.58}, {2, 0.98}, {3, 1.55}, {4, 2.85}}; }

ErrorBudget SweepConfig::budget_for(int b) const {
  if (mode == BudgetMode::kPrecise) return ErrorBudget::precise();
  const auto it = sigma_table.find(b);
  if (it == sigma_table.end()) {
    throw ConfigError("relaxed mode needs sigma_table entry for b=" + std::to_string(b));
  }
  return ErrorBudget::relaxed(it->second);
}

void SweepConfig::validate() const {
  if (domains.empty()) throw ConfigError("no domains selected");
  if (n_values.empty()) throw ConfigError("no array dimensions (n_values) given");
  if (b_values.empty()) throw ConfigError("no bit widths (b_values) given");
  for (int n : n_values) {
    if (n < 1) throw ConfigError("array dimensions must be >= 1");
  }
  for (int b : b_values) {
    if (b < 1 || b > 16) throw ConfigError("bit widths must be in [1, 16]");
  }
  if (m < 1) throw ConfigError("m must be >= 1");
  if (clip_bits < 0) throw ConfigError("clip_bits must be >= 0");
  if (!(weight_density >= 0.0 && weight_density <= 1.0)) {
    throw ConfigError("weight_density must be in [0, 1]");
  }
  if (redundancy_cap < 1) throw ConfigError("redundancy_cap must be >= 1");
  if (mode == BudgetMode::kRelaxed) {
    for (int b : b_values) budget_for(b);
  }
}

std::vector<int> parse_int_range(const std::string& spec) {
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad integer '" + s + "' in '" + spec + "'");
    }
  };
  std::vector<int> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step, got '" + spec + "'");
    const int start = to_int(parts[0]);
    const int stop = to_int(parts[1]);
    if (start < 1 || stop < start) throw ConfigError("bad range bounds in '" + spec + "'");
    if (parts[2] == "log2") {
      for (long v = start; v <= stop; v *= 2) out.push_back(static_cast<int>(v));
    } else {
      const int step = to_int(parts[2]);
      if (step < 1) throw ConfigError("range step must be >= 1");
      for (long v = start; v <= stop; v += step) out.push_back(static_cast<int>(v));
    }
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) {
      if (!p.empty()) out.push_back(to_int(p));
    }
  }
  if (out.empty()) throw ConfigError("empty value list '" + spec + "'");
  return out;
}

SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const std::string what = "sweep config";
  nlohmann::json j;
  try {
    j = detail::parse_json(json_text, what);
  } catch (const IngestError& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError(what + ": top level must be an object");
  SweepConfig cfg;

  if (j.contains("domains")) {
    cfg.domains.clear();
    for (const auto& d : detail::require<std::vector<std::string>>(j, "domains", what)) {
      cfg.domains.push_back(parse_domain(d));
    }
  }
  if (j.contains("n_values")) {
    cfg.n_values = detail::require<std::vector<int>>(j, "n_values", what);
  } else if (j.contains("n_range")) {
    cfg.n_values = parse_int_range(detail::require<std::string>(j, "n_range", what));
  } else {
    cfg.n_values = parse_int_range("16:4096:log2");
  }
  cfg.b_values = detail::optional<std::vector<int>>(j, "b_values", cfg.b_values, what);
  cfg.m = detail::optional<int>(j, "m", cfg.m, what);
  cfg.mode = parse_mode(detail::optional<std::string>(j, "mode", to_string(cfg.mode), what));
  if (j.contains("sigma_table")) {
    cfg.sigma_table.clear();
    for (const auto& [key, value] : j.at("sigma_table").items()) {
      int b = 0;
      try {
        b = std::stoi(key);
      } catch (const std::exception&) {
        throw ConfigError(what + ": sigma_table keys must be bit widths");
      }
      if (!value.is_number() || !(value.get<double>() > 0.0)) {
        throw ConfigError(what + ": sigma_table values must be positive numbers");
      }
      cfg.sigma_table[b] = value.get<double>();
    }
  }
  cfg.clip_bits = detail::optional<int>(j, "clip_bits", cfg.clip_bits, what);
  cfg.weight_density = detail::optional<double>(j, "weight_density", cfg.weight_density, what);
  cfg.adc_min_rate = detail::optional<double>(j, "adc_min_rate_hz", cfg.adc_min_rate, what);
  cfg.redundancy_cap = detail::optional<int>(j, "redundancy_cap", cfg.redundancy_cap, what);
  cfg.threads = detail::optional<int>(j, "threads", cfg.threads, what);

  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (j.contains("fixtures")) {
    const auto& f = j.at("fixtures");
    if (f.contains("cells")) {
      for (const auto& [key, value] : f.at("cells").items()) {
        int b = 0;
        try {
          b = std::stoi(key);
        } catch (const std::exception&) {
          throw ConfigError(what + ": fixtures.cells keys must be bit widths");
        }
        if (!value.is_string()) throw ConfigError(what + ": fixtures.cells values must be paths");
        cfg.fixtures.cells[b] = resolve(value.get<std::string>());
      }
    }
    auto path_of = [&](const char* key) -> std::filesystem::path {
      return f.contains(key) ? resolve(detail::require<std::string>(f, key, what)) : std::filesystem::path{};
    };
    cfg.fixtures.tdc = path_of("tdc");
    cfg.fixtures.analog = path_of("analog");
    cfg.fixtures.adc_survey = path_of("adc_survey");
    cfg.fixtures.adc_envelope = path_of("adc_envelope");
    cfg.fixtures.digital = path_of("digital");
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_sweep_config(text, path.parent_path());
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

bool uses(const SweepConfig& cfg, Domain d) {
  return std::find(cfg.domains.begin(), cfg.domains.end(), d) != cfg.domains.end();
}

std::filesystem::path need(const std::filesystem::path& p, const std::string& name) {
  if (p.empty()) throw ConfigError("missing fixture: " + name);
  if (!std::filesystem::exists(p)) throw ConfigError("fixture not found: " + p.string());
  return p;
}

}  // namespace

Fixtures load_fixtures(const SweepConfig& cfg) {
  Fixtures fx;
  if (uses(cfg, Domain::kTd)) {
    for (int b : cfg.b_values) {
      const auto it = cfg.fixtures.cells.find(b);
      if (it == cfg.fixtures.cells.end()) {
        throw ConfigError("missing fixture: cell spec for b=" + std::to_string(b));
      }
      CellSpec spec = load_cell_spec(need(it->second, "cell"));
      if (spec.bit_width != b) {
        throw ConfigError(it->second.string() + ": bit_width " + std::to_string(spec.bit_width) +
                          " registered under b=" + std::to_string(b));
      }
      fx.cells.emplace(b, std::move(spec));
    }
    fx.tdc = load_tdc_params(need(cfg.fixtures.tdc, "tdc"));
  }
  if (uses(cfg, Domain::kAnalog)) {
    fx.analog = load_analog_params(need(cfg.fixtures.analog, "analog"));
    if (!cfg.fixtures.adc_envelope.empty()) {
      fx.adc = read_adc_envelope(need(cfg.fixtures.adc_envelope, "adc_envelope"));
    } else {
      const auto survey = read_adc_survey(need(cfg.fixtures.adc_survey, "adc_survey"));
      fx.adc = fit_adc_envelope(survey, cfg.adc_min_rate);
    }
  }
  if (uses(cfg, Domain::kDigital)) {
    fx.digital = load_digital_table(need(cfg.fixtures.digital, "digital"));
  }
  return fx;
}

std::size_t SweepResult::feasible_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.feasible; }));
}

namespace {

// Keeps only the point coordinates and the budget; partial results of a
// failed point are not reported.
SweepRow infeasible(const SweepRow& row, const std::string& why) {
  SweepRow out;
  out.domain = row.domain;
  out.n = row.n;
  out.b = row.b;
  out.m = row.m;
  out.mode = row.mode;
  out.clip_bits = row.clip_bits;
  out.sigma_budget = row.sigma_budget;
  out.feasible = false;
  out.status = why;
  return out;
}

SweepRow evaluate_td(const SweepConfig& cfg, const Fixtures& fx, SweepRow row) {
  const auto it = fx.cells.find(row.b);
  if (it == fx.cells.end() || !fx.tdc) {
    throw ConfigError("TD point needs cell and TDC fixtures for b=" + std::to_string(row.b));
  }
  const CellSpec& spec = it->second;
  const TdcParams& tdc = *fx.tdc;
  const CellErrorStats cell = cell_error_stats(spec, InputDistribution::uniform(row.b, cfg.weight_density));
  const ErrorBudget budget = cfg.budget_for(row.b);
  row.sigma_budget = budget.sigma_max;

  try {
    row.r = solve_redundancy(cell, row.n, budget, cfg.redundancy_cap);
  } catch (const InfeasibleError&) {
    return infeasible(row, "redundancy_cap_exceeded");
  }
  const ChainErrorStats chain = chain_stats(cell, row.n, row.r);
  row.mu_chain = chain.mu;
  row.sigma_achieved = chain.sigma;

  TdcRange range;
  try {
    range = reduced_range(row.n, row.b, row.clip_bits);
  } catch (const DomainError&) {
    return infeasible(row, "clip_exceeds_range");
  }
  row.max_in = range.max_in;

  // The hybrid counter spans the (clipped) output range in unit steps.
  const std::int64_t l_osc = optimal_losc(tdc, range.max_in, row.r, row.m);
  const double e_hybrid = hybrid_tdc_energy(tdc, range.max_in, row.r, row.m, l_osc);
  const double e_sar = sar_tdc_energy(tdc, range.range_bits, row.m);
  row.l_osc = l_osc;
  row.e_tdc_hybrid = e_hybrid;
  row.e_tdc_sar = e_sar;

  double e_tdc = 0.0, tdc_time = 0.0, tdc_area = 0.0;
  if (e_hybrid <= e_sar) {
    row.tdc = TdcKind::kHybrid;
    e_tdc = e_hybrid;
    tdc_time = hybrid_conversion_time(tdc, l_osc);
    tdc_area = hybrid_tdc_area(tdc, range.max_in, row.r, row.m, l_osc);
  } else {
    row.tdc = TdcKind::kSar;
    e_tdc = e_sar;
    tdc_time = sar_conversion_time(tdc, range.range_bits);
    tdc_area = sar_tdc_area(tdc, range.range_bits, row.m);
  }

  row.energy_per_mac = td_mac_energy(cell_energy_at_r(spec, row.r), e_tdc, row.n);
  const double latency = td_latency(row.n, row.r, spec, tdc_time);
  row.throughput = static_cast<double>(row.n) * row.m / latency;
  row.area_per_mac =
      td_cell_area(row.b, row.r, spec.area.cpp, spec.area.h_cell) + tdc_area / row.n;
  return row;
}

SweepRow evaluate_analog(const SweepConfig& cfg, const Fixtures& fx, SweepRow row) {
  if (!fx.analog || !fx.adc) throw ConfigError("analog point needs analog and ADC fixtures");
  const AnalogParams& p = *fx.analog;
  const AdcEnvelope& adc = *fx.adc;
  const double sigma_max = cfg.budget_for(row.b).sigma_max;
  row.sigma_budget = sigma_max;

  try {
    row.r = solve_analog_redundancy(p, row.n, sigma_max, cfg.redundancy_cap);
  } catch (const InfeasibleError&) {
    return infeasible(row, "redundancy_cap_exceeded");
  }
  row.sigma_achieved = analog_array_sigma(p, row.n, row.r);

  TdcRange range;
  try {
    range = reduced_range(row.n, row.b, row.clip_bits);
  } catch (const DomainError&) {
    return infeasible(row, "clip_exceeds_range");
  }
  row.max_in = range.max_in;
  const double enob = required_enob(static_cast<double>(range.max_in), sigma_max);
  row.enob = enob;

  double sample_rate = 0.0;
  try {
    sample_rate = adc.throughput_fit(enob);
  } catch (const OutOfRangeError&) {
    return infeasible(row, "adc_enob_unavailable");
  }
  if (!(adc.area_pick > 0.0)) return infeasible(row, "adc_area_unavailable");

  const double e_adc = adc_energy(enob, adc.k1, adc.k2);
  row.energy_per_mac = analog_mac_energy(p, e_adc, row.n, row.r);
  const int adcs = (row.m + p.m_shared - 1) / p.m_shared;
  row.throughput = static_cast<double>(row.n) * sample_rate * adcs;
  const double macs = static_cast<double>(row.n) * row.m;
  row.area_per_mac = (row.r * p.cell_area * macs + adcs * adc.area_pick) / macs;
  return row;
}

SweepRow evaluate_digital(const Fixtures& fx, SweepRow row) {
  if (!fx.digital) throw ConfigError("digital point needs the digital table fixture");
  const DigitalTable& t = *fx.digital;
  row.r = 1;
  row.sigma_achieved = 0.0;
  try {
    row.energy_per_mac = digital_mac_energy(t, row.n, row.b);
    row.throughput = digital_throughput(t, row.n, row.b, row.m);
    row.area_per_mac = t.area(row.n, row.b) / row.n;
  } catch (const OutOfRangeError&) {
    return infeasible(row, "outside_digital_grid");
  }
  return row;
}

auto row_key(const SweepRow& r) {
  return std::make_tuple(to_string(r.domain), r.n, r.b, r.m, r.clip_bits);
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return row_key(a) < row_key(b); });
}

// Re-derives each feasible row's error from the raw fixture statistics and
// checks it against the budget without trusting the solver's bookkeeping.
void verify_budgets(const SweepConfig& cfg, const Fixtures& fx, const SweepResult& result) {
  for (const auto& row : result.rows) {
    if (!row.feasible) continue;
    double sigma = 0.0;
    if (row.domain == Domain::kTd) {
      const CellErrorStats cell =
          cell_error_stats(fx.cells.at(row.b), InputDistribution::uniform(row.b, cfg.weight_density));
      sigma = chain_stats(cell, row.n, row.r).sigma;
    } else if (row.domain == Domain::kAnalog) {
      sigma = analog_array_sigma(*fx.analog, row.n, row.r);
    }
    const double budget = cfg.budget_for(row.b).sigma_max;
    if (!(sigma <= budget)) {
      throw Error("internal: " + to_string(row.domain) + " row n=" + std::to_string(row.n) +
                  " b=" + std::to_string(row.b) + " violates its error budget");
    }
  }
}

struct PointSpec {
  Domain domain;
  int n;
  int b;
  int m;
  int clip_bits;
};

SweepResult evaluate_all(const SweepConfig& cfg, const Fixtures& fx, const std::vector<PointSpec>& pts) {
  SweepResult result;
  result.rows.resize(pts.size());
  // Points are independent; each worker owns a strided slice of the output.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(
      cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw, std::max<std::size_t>(1, pts.size()));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t id) {
    try {
      for (std::size_t i = id; i < pts.size(); i += workers) {
        const auto& p = pts[i];
        result.rows[i] = evaluate_point(cfg, fx, p.domain, p.n, p.b, p.m, p.clip_bits);
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t id = 0; id < workers; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  sort_rows(result.rows);
  verify_budgets(cfg, fx, result);
  return result;
}

}  // namespace

SweepRow evaluate_point(const SweepConfig& cfg, const Fixtures& fx, Domain domain, int n, int b,
                        int m, int clip_bits) {
  if (n < 1 || b < 1 || m < 1) throw ConfigError("sweep point needs n, b, m >= 1");
  SweepRow row;
  row.domain = domain;
  row.n = n;
  row.b = b;
  row.m = m;
  row.mode = cfg.mode;
  row.clip_bits = clip_bits;
  switch (domain) {
    case Domain::kTd:
      return evaluate_td(cfg, fx, row);
    case Domain::kAnalog:
      return evaluate_analog(cfg, fx, row);
    case Domain::kDigital:
      return evaluate_digital(fx, row);
  }
  return row;
}

SweepResult run_sweep(const SweepConfig& cfg, const Fixtures& fx) {
  cfg.validate();
  std::vector<PointSpec> pts;
  for (Domain d : cfg.domains) {
    for (int n : cfg.n_values) {
      for (int b : cfg.b_values) pts.push_back({d, n, b, cfg.m, cfg.clip_bits});
    }
  }
  return evaluate_all(cfg, fx, pts);
}

SweepResult run_sweep(const SweepConfig& cfg) { return run_sweep(cfg, load_fixtures(cfg)); }

SweepResult resnet_scenario(const SweepConfig& cfg, const Fixtures& fx) {
  cfg.validate();
  // 3x3x64 kernel, then 32- and 16-channel decompositions: twice / four
  // times the parallel chains in the same area, one / two fewer range bits.
  static constexpr PointSpec kSplits[] = {
      {Domain::kTd, 576, 0, 8, 0}, {Domain::kTd, 288, 0, 16, 1}, {Domain::kTd, 144, 0, 32, 2}};
  std::vector<PointSpec> pts;
  for (const auto& s : kSplits) {
    for (int b : cfg.b_values) pts.push_back({s.domain, s.n, b, s.m, s.clip_bits});
  }
  return evaluate_all(cfg, fx, pts);
}

SweepResult resnet_scenario(const SweepConfig& cfg) {
  SweepConfig td_only = cfg;
  td_only.domains = {Domain::kTd};
  return resnet_scenario(td_only, load_fixtures(td_only));
}

}  // namespace tdvmm
