#include "tdvmm/analog_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

#include "csv.hpp"
#include "json_util.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

void AnalogParams::validate() const {
  if (!(e_cap >= 0.0) || !(e_logic >= 0.0)) throw ConfigError("analog energies must be >= 0");
  if (!(sigma_cap_rel >= 0.0 && sigma_cap_rel < 1.0)) {
    throw ConfigError("sigma_cap_rel must be in [0, 1)");
  }
  if (m_shared < 1) throw ConfigError("m_shared must be >= 1");
  if (!(cell_area >= 0.0)) throw ConfigError("analog cell area must be >= 0");
}

AnalogParams parse_analog_params(const std::string& json_text) {
  const std::string what = "analog params";
  const auto j = detail::parse_json(json_text, what);
  AnalogParams p;
  p.e_cap = detail::require<double>(j, "e_cap_joules", what);
  p.e_logic = detail::require<double>(j, "e_logic_joules", what);
  p.sigma_cap_rel = detail::require<double>(j, "sigma_cap_rel", what);
  p.m_shared = detail::require<int>(j, "m_shared", what);
  p.cell_area = detail::optional<double>(j, "cell_area_m2", 0.0, what);
  p.validate();
  return p;
}

AnalogParams load_analog_params(const std::filesystem::path& path) {
  try {
    return parse_analog_params(detail::read_text_file(path));
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<AdcSurveyRecord> parse_adc_survey(const std::string& csv_text) {
  const std::string what = "ADC survey";
  const auto t = detail::parse_csv(csv_text, what);
  detail::expect_header(t, {"enob", "energy_per_conv_joules", "sample_rate_hz", "area_m2"}, what);
  std::vector<AdcSurveyRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = what + " line " + std::to_string(t.line_numbers[i]);
    AdcSurveyRecord r{detail::parse_double(row[0], where), detail::parse_double(row[1], where),
                      detail::parse_double(row[2], where), detail::parse_double(row[3], where)};
    if (!(r.enob > 0.0 && r.energy_per_conv > 0.0 && r.sample_rate > 0.0 && r.area > 0.0) ||
        !std::isfinite(r.enob * r.energy_per_conv * r.sample_rate * r.area)) {
      throw IngestError(where + ": all fields must be positive and finite");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<AdcSurveyRecord> read_adc_survey(const std::filesystem::path& path) {
  try {
    return parse_adc_survey(detail::read_text_file(path));
  } catch (const Error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

ThroughputEnvelope::ThroughputEnvelope(std::vector<Point> bin_maxima) : points_(std::move(bin_maxima)) {
  std::sort(points_.begin(), points_.end(), [](const Point& a, const Point& b) {
    return std::tie(a.enob, a.sample_rate) < std::tie(b.enob, b.sample_rate);
  });
  // Suffix maximum: rate available at >= enob.
  for (std::size_t i = points_.size(); i-- > 1;) {
    points_[i - 1].sample_rate = std::max(points_[i - 1].sample_rate, points_[i].sample_rate);
  }
}

double ThroughputEnvelope::max_enob() const {
  return points_.empty() ? 0.0 : points_.back().enob;
}

double ThroughputEnvelope::operator()(double enob) const {
  if (points_.empty() || enob > points_.back().enob) {
    throw OutOfRangeError("no surveyed ADC reaches ENOB " + detail::format_double(enob));
  }
  const auto it = std::lower_bound(points_.begin(), points_.end(), enob,
                                   [](const Point& p, double e) { return p.enob < e; });
  return it->sample_rate;
}

double adc_energy(double enob, double k1, double k2) {
  if (!(enob >= 0.0)) throw DomainError("enob must be >= 0");
  return k1 * enob + k2 * std::pow(4.0, enob);
}

double enob_from_snr(double snr_db) {
  if (!(snr_db >= 1.76)) throw DomainError("SNR below 1.76 dB implies negative ENOB");
  return (snr_db - 1.76) / 6.02;
}

namespace {

bool record_less(const AdcSurveyRecord& a, const AdcSurveyRecord& b) {
  return std::tie(a.energy_per_conv, a.enob, a.sample_rate, a.area) <
         std::tie(b.energy_per_conv, b.enob, b.sample_rate, b.area);
}

long bin_of(double enob) { return static_cast<long>(std::floor(enob / kEnvelopeBinWidth)); }

struct Fit {
  double k1 = 0.0;
  double k2 = 0.0;
  double residual = 0.0;
};

// Relative-error least squares of E = k1*a + k2*b with k1, k2 >= 0.
Fit fit_two_term(const std::vector<AdcSurveyRecord>& pts) {
  std::vector<double> u, v;
  for (const auto& p : pts) {
    u.push_back(p.enob / p.energy_per_conv);
    v.push_back(std::pow(4.0, p.enob) / p.energy_per_conv);
  }
  // Column scaling keeps the 2x2 normal equations well conditioned.
  double nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  double suu = 0, suv = 0, svv = 0, su = 0, sv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i] / nu, b = v[i] / nv;
    suu += a * a;
    suv += a * b;
    svv += b * b;
    su += a;
    sv += b;
  }
  auto residual = [&](double k1, double k2) {
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = k1 * u[i] + k2 * v[i] - 1.0;
      r += d * d;
    }
    return r;
  };

  const double det = suu * svv - suv * suv;
  if (det > 1e-14 * suu * svv) {
    const double c1 = (su * svv - sv * suv) / det;
    const double c2 = (sv * suu - su * suv) / det;
    if (c1 >= 0.0 && c2 >= 0.0) {
      const double k1 = c1 / nu, k2 = c2 / nv;
      return {k1, k2, residual(k1, k2)};
    }
  }
  // Active-set fallback: one coefficient pinned at zero.
  const Fit only_k1{su / suu / nu, 0.0, residual(su / suu / nu, 0.0)};
  const Fit only_k2{0.0, sv / svv / nv, residual(0.0, sv / svv / nv)};
  return only_k1.residual <= only_k2.residual ? only_k1 : only_k2;
}

}  // namespace

AdcEnvelope fit_adc_envelope(std::span<const AdcSurveyRecord> records, double min_rate) {
  std::vector<AdcSurveyRecord> survivors;
  for (const auto& r : records) {
    if (r.sample_rate >= min_rate) survivors.push_back(r);
  }
  if (survivors.size() < 2) {
    throw InsufficientDataError("ADC envelope needs at least 2 records at >= " +
                                detail::format_double(min_rate) + " Hz, got " +
                                std::to_string(survivors.size()));
  }

  std::map<long, AdcSurveyRecord> minima;
  for (const auto& r : survivors) {
    auto [it, inserted] = minima.try_emplace(bin_of(r.enob), r);
    if (!inserted && record_less(r, it->second)) it->second = r;
  }
  if (minima.size() < 2) {
    throw InsufficientDataError("ADC envelope needs records in at least 2 ENOB bins");
  }
  std::vector<AdcSurveyRecord> pts;
  for (const auto& [bin, r] : minima) pts.push_back(r);

  Fit fit = fit_two_term(pts);
  if (!(fit.k1 > 0.0) || !(fit.k2 > 0.0)) {
    throw InsufficientDataError("ADC survey does not determine both k1 and k2");
  }
  double scale = std::numeric_limits<double>::infinity();
  for (const auto& r : survivors) {
    scale = std::min(scale, r.energy_per_conv / adc_energy(r.enob, fit.k1, fit.k2));
  }

  AdcEnvelope env;
  env.k1 = fit.k1 * scale;
  env.k2 = fit.k2 * scale;
  env.survivors = survivors.size();

  std::map<long, ThroughputEnvelope::Point> fastest;
  const double enob_floor = enob_from_snr(20.0 * std::log10(kAreaMinMacs));
  double area = 0.0;
  for (const auto& r : survivors) {
    if (r.energy_per_conv > kThroughputEnergyFactor * adc_energy(r.enob, env.k1, env.k2)) continue;
    auto [it, inserted] = fastest.try_emplace(bin_of(r.enob), ThroughputEnvelope::Point{r.enob, r.sample_rate});
    auto& p = it->second;
    if (!inserted && std::tie(r.sample_rate, r.enob) > std::tie(p.sample_rate, p.enob)) {
      p = {r.enob, r.sample_rate};
    }
    if (r.enob >= enob_floor && (area == 0.0 || r.area < area)) area = r.area;
  }
  std::vector<ThroughputEnvelope::Point> pts_rate;
  for (const auto& [bin, p] : fastest) pts_rate.push_back(p);
  env.throughput_fit = ThroughputEnvelope(std::move(pts_rate));
  env.area_pick = area;
  return env;
}

std::string adc_envelope_to_json(const AdcEnvelope& env) {
  nlohmann::ordered_json j;
  j["k1_joules"] = env.k1;
  j["k2_joules"] = env.k2;
  j["area_pick_m2"] = env.area_pick;
  j["survivors"] = env.survivors;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : env.throughput_fit.points()) {
    arr.push_back({{"enob", p.enob}, {"sample_rate_hz", p.sample_rate}});
  }
  j["throughput_envelope"] = std::move(arr);
  return j.dump(2) + "\n";
}

AdcEnvelope adc_envelope_from_json(const std::string& text) {
  const std::string what = "ADC envelope";
  const auto j = detail::parse_json(text, what);
  AdcEnvelope env;
  env.k1 = detail::require<double>(j, "k1_joules", what);
  env.k2 = detail::require<double>(j, "k2_joules", what);
  env.area_pick = detail::require<double>(j, "area_pick_m2", what);
  env.survivors = detail::optional<std::size_t>(j, "survivors", 0, what);
  if (!(env.k1 > 0.0) || !(env.k2 > 0.0)) throw ConfigError(what + ": k1 and k2 must be > 0");
  std::vector<ThroughputEnvelope::Point> pts;
  for (const auto& p : detail::require<nlohmann::json>(j, "throughput_envelope", what)) {
    pts.push_back({detail::require<double>(p, "enob", what),
                   detail::require<double>(p, "sample_rate_hz", what)});
  }
  env.throughput_fit = ThroughputEnvelope(std::move(pts));
  return env;
}

void write_adc_envelope(const AdcEnvelope& env, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << adc_envelope_to_json(env);
  if (!out) throw IoError("write failed: " + path.string());
}

AdcEnvelope read_adc_envelope(const std::filesystem::path& path) {
  try {
    return adc_envelope_from_json(detail::read_text_file(path));
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double analog_mac_energy(const AnalogParams& p, double e_adc, int n, int r) {
  if (n < 1 || r < 1) throw DomainError("analog_mac_energy requires n >= 1 and r >= 1");
  return r * p.e_cap + p.e_logic + e_adc / static_cast<double>(n);
}

double analog_array_sigma(const AnalogParams& p, int n, int r) {
  if (n < 1 || r < 1) throw DomainError("analog_array_sigma requires n >= 1 and r >= 1");
  return p.sigma_cap_rel * std::sqrt(static_cast<double>(n) / static_cast<double>(r));
}

int solve_analog_redundancy(const AnalogParams& p, int n, double sigma_max, int cap) {
  if (!(sigma_max > 0.0)) throw DomainError("sigma_max must be > 0");
  if (n < 1) throw DomainError("n must be >= 1");
  auto meets = [&](int r) { return analog_array_sigma(p, n, r) <= sigma_max; };
  const double ratio = p.sigma_cap_rel / sigma_max;
  const double seed = std::ceil(n * ratio * ratio);
  int r = static_cast<int>(std::clamp(seed, 1.0, static_cast<double>(cap)));
  while (r > 1 && meets(r - 1)) --r;
  while (!meets(r)) {
    if (r >= cap) {
      throw InfeasibleError("analog redundancy exceeds cap " + std::to_string(cap) + " for n=" +
                            std::to_string(n));
    }
    ++r;
  }
  return r;
}

double required_enob(double full_scale, double sigma_max) {
  if (!(full_scale > 0.0) || !(sigma_max > 0.0)) {
    throw DomainError("required_enob needs positive full scale and sigma");
  }
  const double snr_db = 20.0 * std::log10(full_scale / sigma_max);
  if (snr_db < 1.76) return 0.0;
  const double enob = enob_from_snr(snr_db);
  // Round up to the next half bit; the epsilon keeps exact half-bit values.
  return std::ceil(enob * 2.0 - 1e-9) / 2.0;
}

}  // namespace tdvmm
