#include "tdvmm/tdc_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "json_util.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

namespace {

void require_positive(std::int64_t v, const char* name) {
  if (v < 1) throw DomainError(std::string(name) + " must be >= 1");
}

double pow2(int k) { return std::ldexp(1.0, k); }

}  // namespace

void TdcParams::validate() const {
  for (double e : {e_td_and, e_sample, e_cnt, e_cnt_load, a_td_and, a_sample, a_counter}) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("TDC energies/areas must be >= 0");
  }
  if (!(t_unit > 0.0)) throw ConfigError("TDC t_unit must be > 0");
}

TdcParams parse_tdc_params(const std::string& json_text) {
  const std::string what = "tdc params";
  const auto j = detail::parse_json(json_text, what);
  TdcParams p;
  p.e_td_and = detail::require<double>(j, "e_td_and_joules", what);
  p.e_sample = detail::require<double>(j, "e_sample_joules", what);
  p.e_cnt = detail::require<double>(j, "e_cnt_joules", what);
  p.e_cnt_load = detail::require<double>(j, "e_cnt_load_joules", what);
  p.t_unit = detail::require<double>(j, "t_unit_seconds", what);
  p.a_td_and = detail::optional<double>(j, "a_td_and_m2", 0.0, what);
  p.a_sample = detail::optional<double>(j, "a_sample_m2", 0.0, what);
  p.a_counter = detail::optional<double>(j, "a_counter_m2", 0.0, what);
  p.validate();
  return p;
}

TdcParams load_tdc_params(const std::filesystem::path& path) {
  try {
    return parse_tdc_params(detail::read_text_file(path));
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

int hybrid_sar_bits(std::int64_t l_osc) {
  require_positive(l_osc, "l_osc");
  // ceil(log2(L)) == bit_width(L - 1) for L >= 1.
  return 1 + static_cast<int>(std::bit_width(static_cast<std::uint64_t>(l_osc - 1)));
}

double hybrid_tdc_energy(const TdcParams& p, std::int64_t n, int r, int m, std::int64_t l_osc) {
  require_positive(n, "n");
  require_positive(r, "r");
  require_positive(m, "m");
  const int sar_bits = hybrid_sar_bits(l_osc);
  const double nr = static_cast<double>(n) * r;
  const double counts = nr / (2.0 * static_cast<double>(l_osc));
  return (p.e_cnt / m + p.e_cnt_load) * counts + 2.0 * nr * p.e_td_and / m +
         p.e_td_and * pow2(sar_bits) + sar_bits * p.e_sample;
}

double losc_closed_form(const TdcParams& p, std::int64_t n, int r, int m) {
  require_positive(n, "n");
  require_positive(r, "r");
  require_positive(m, "m");
  if (!(p.e_td_and > 0.0)) throw DomainError("closed form needs e_td_and > 0");
  const double ln2 = std::numbers::ln2;
  const double nr = static_cast<double>(n) * r;
  const double load = p.e_cnt / m + p.e_cnt_load;
  return (std::sqrt(load * 2.0 * p.e_td_and * nr * std::log(4.0)) - p.e_sample) /
         (4.0 * p.e_td_and * ln2);
}

std::int64_t optimal_losc(const TdcParams& p, std::int64_t n, int r, int m) {
  require_positive(n, "n");
  require_positive(r, "r");
  require_positive(m, "m");
  const std::int64_t nr = n * r;
  const std::int64_t l_max = (nr + 1) / 2;

  // Within a block L in (2^(k-1), 2^k] the SAR bit count is constant, so the
  // energy only changes through the counter term, which is non-increasing in
  // L. Each block's minimum therefore sits at its upper end, leaving the
  // powers of two and l_max as the only candidates. With zero counter load
  // every block is flat and L = 1 wins outright.
  std::int64_t best_l = 1;
  double best_e = hybrid_tdc_energy(p, n, r, m, 1);
  auto consider = [&](std::int64_t l) {
    const double e = hybrid_tdc_energy(p, n, r, m, l);
    if (e < best_e) {
      best_e = e;
      best_l = l;
    }
  };
  for (std::int64_t l = 2; l < l_max; l *= 2) consider(l);
  if (l_max > 1) consider(l_max);
  return best_l;
}

double sar_tdc_energy(const TdcParams& p, int b_range, int m) {
  require_positive(b_range, "b_range");
  require_positive(m, "m");
  if (b_range > 62) throw DomainError("b_range too large");
  const double mm = static_cast<double>(m);
  return p.e_td_and * ((mm + 1.0) / mm) * (pow2(b_range) - 2.0) + b_range * p.e_sample;
}

TdcRange make_range(std::int64_t max_in) {
  require_positive(max_in, "max_in");
  return {max_in, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(max_in)))};
}

TdcRange reduced_range(std::int64_t n, int b, int clip_bits) {
  require_positive(n, "n");
  if (b < 1 || b > 30) throw DomainError("bit width b must be in [1, 30]");
  if (clip_bits < 0) throw DomainError("clip_bits must be >= 0");
  const std::int64_t full = n * ((std::int64_t{1} << b) - 1);
  const int full_bits = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(full)));
  if (clip_bits >= full_bits) {
    throw DomainError("clip_bits " + std::to_string(clip_bits) + " removes the whole " +
                      std::to_string(full_bits) + "-bit output range");
  }
  return make_range(full >> clip_bits);
}

double hybrid_conversion_time(const TdcParams& p, std::int64_t l_osc) {
  const int sar_bits = hybrid_sar_bits(l_osc);
  return (2.0 * static_cast<double>(l_osc) + pow2(sar_bits)) * p.t_unit;
}

double sar_conversion_time(const TdcParams& p, int b_range) {
  require_positive(b_range, "b_range");
  return (pow2(b_range) - 1.0) * p.t_unit;
}

double hybrid_tdc_area(const TdcParams& p, std::int64_t n, int r, int m, std::int64_t l_osc) {
  require_positive(n, "n");
  require_positive(r, "r");
  require_positive(m, "m");
  const int sar_bits = hybrid_sar_bits(l_osc);
  const auto periods = static_cast<std::uint64_t>((n * r + 2 * l_osc - 1) / (2 * l_osc));
  const int msb_bits = std::max(1, static_cast<int>(std::bit_width(periods)));
  const double shared = static_cast<double>(l_osc) * p.a_td_and + p.a_counter;
  return pow2(sar_bits) * p.a_td_and + (sar_bits + msb_bits) * p.a_sample + shared / m;
}

double sar_tdc_area(const TdcParams& p, int b_range, int m) {
  require_positive(b_range, "b_range");
  require_positive(m, "m");
  const double mm = static_cast<double>(m);
  return p.a_td_and * ((mm + 1.0) / mm) * (pow2(b_range) - 2.0) + b_range * p.a_sample;
}

}  // namespace tdvmm
