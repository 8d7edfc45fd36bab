#include "tdvmm/cell_model.hpp"

#include <cmath>
#include <string>

#include "json_util.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

CellTable::CellTable(std::size_t x_levels, std::size_t w_levels, double fill)
    : x_levels_(x_levels), w_levels_(w_levels), data_(x_levels * w_levels, fill) {}

CellTable CellTable::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ConfigError("cell table is empty");
  CellTable t(rows.size(), rows.front().size());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != t.w_levels_) throw ConfigError("cell table rows have unequal length");
    for (std::size_t w = 0; w < t.w_levels_; ++w) t(x, w) = rows[x][w];
  }
  return t;
}

void CellSpec::validate() const {
  if (bit_width < 1 || bit_width > 16) {
    throw ConfigError("cell bit_width must be in [1, 16], got " + std::to_string(bit_width));
  }
  const std::size_t xs = x_levels();
  if (inl.x_levels() != xs || sigma.x_levels() != xs) {
    throw ConfigError("cell tables must have 2^B = " + std::to_string(xs) + " rows");
  }
  if (inl.w_levels() < 2 || sigma.w_levels() != inl.w_levels()) {
    throw ConfigError("inl and sigma tables need matching weight columns (at least w in {0,1})");
  }
  for (std::size_t x = 0; x < xs; ++x) {
    for (std::size_t w = 0; w < inl.w_levels(); ++w) {
      if (!std::isfinite(inl(x, w)) || !std::isfinite(sigma(x, w))) {
        throw ConfigError("cell tables contain non-finite entries");
      }
      if (sigma(x, w) < 0.0) throw ConfigError("sigma table entries must be >= 0");
    }
  }
  if (!(e_op > 0.0)) throw ConfigError("e_op must be > 0");
  if (!(e_op_per_r >= 0.0)) throw ConfigError("e_op_per_r must be >= 0");
  if (!(d_step > 0.0)) throw ConfigError("d_step must be > 0");
  const double full_scale = static_cast<double>(xs - 1) * d_step;
  if (!(d_max >= full_scale)) {
    throw ConfigError("d_max must cover the full-scale delay (2^B - 1) * d_step");
  }
  if (!(area.cpp > 0.0) || !(area.h_cell > 0.0)) {
    throw ConfigError("cpp and h_cell must be > 0");
  }
}

CellSpec parse_cell_spec(const std::string& json_text) {
  const std::string what = "cell spec";
  const auto j = detail::parse_json(json_text, what);
  CellSpec s;
  s.bit_width = detail::require<int>(j, "bit_width", what);
  s.inl = CellTable::from_rows(detail::require<std::vector<std::vector<double>>>(j, "inl", what));
  s.sigma =
      CellTable::from_rows(detail::require<std::vector<std::vector<double>>>(j, "sigma", what));
  s.e_op = detail::require<double>(j, "e_op_joules", what);
  s.e_op_per_r = detail::require<double>(j, "e_op_per_r_joules", what);
  s.d_step = detail::require<double>(j, "d_step_seconds", what);
  s.d_max = detail::require<double>(j, "d_max_seconds", what);
  s.area.cpp = detail::require<double>(j, "cpp_meters", what);
  s.area.h_cell = detail::require<double>(j, "h_cell_meters", what);
  s.validate();
  return s;
}

CellSpec load_cell_spec(const std::filesystem::path& path) {
  try {
    return parse_cell_spec(detail::read_text_file(path));
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

InputDistribution InputDistribution::binary(std::vector<double> px, double pw) {
  InputDistribution d{std::move(px), {1.0 - pw, pw}};
  d.validate();
  return d;
}

InputDistribution InputDistribution::uniform(int bit_width, double pw) {
  if (bit_width < 1 || bit_width > 16) throw DomainError("bit_width out of range");
  const std::size_t levels = std::size_t{1} << bit_width;
  return binary(std::vector<double>(levels, 1.0 / static_cast<double>(levels)), pw);
}

void InputDistribution::validate() const {
  auto check = [](const std::vector<double>& p, const char* name) {
    if (p.empty()) throw ConfigError(std::string(name) + " is empty");
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " entries must be in [0,1]");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError(std::string(name) + " must sum to 1");
  };
  check(px, "px");
  check(pw_levels, "weight distribution");
}

double esnr(double snr_cell, double e_op) {
  if (!(snr_cell > 0.0) || !(e_op > 0.0)) {
    throw DomainError("esnr requires snr_cell > 0 and e_op > 0");
  }
  return snr_cell / std::sqrt(e_op);
}

CellErrorStats cell_error_stats(const CellSpec& spec, const InputDistribution& dist) {
  dist.validate();
  if (dist.px.size() != spec.x_levels()) {
    throw ConfigError("input distribution has " + std::to_string(dist.px.size()) +
                      " x levels, cell expects " + std::to_string(spec.x_levels()));
  }
  if (dist.pw_levels.size() != spec.inl.w_levels()) {
    throw ConfigError("weight distribution does not match the cell's weight columns");
  }

  CellErrorStats s;
  for (std::size_t x = 0; x < dist.px.size(); ++x) {
    for (std::size_t w = 0; w < dist.pw_levels.size(); ++w) {
      const double p = dist.px[x] * dist.pw_levels[w];
      s.mu += spec.inl(x, w) * p;
      s.evpv += spec.sigma(x, w) * spec.sigma(x, w) * p;
    }
  }
  // Second pass around the mean; never negative. A constant INL over the
  // support has exactly zero VHM regardless of rounding in mu.
  bool constant = true;
  double first = 0.0;
  bool seen = false;
  for (std::size_t x = 0; x < dist.px.size(); ++x) {
    for (std::size_t w = 0; w < dist.pw_levels.size(); ++w) {
      if (dist.px[x] * dist.pw_levels[w] <= 0.0) continue;
      if (!seen) {
        first = spec.inl(x, w);
        seen = true;
      } else if (spec.inl(x, w) != first) {
        constant = false;
      }
    }
  }
  if (constant) return s;
  for (std::size_t x = 0; x < dist.px.size(); ++x) {
    for (std::size_t w = 0; w < dist.pw_levels.size(); ++w) {
      const double d = spec.inl(x, w) - s.mu;
      s.vhm += d * d * dist.px[x] * dist.pw_levels[w];
    }
  }
  return s;
}

CellErrorStats scale_with_redundancy(const CellErrorStats& stats, int r) {
  if (r < 1) throw DomainError("redundancy r must be >= 1");
  const double rr = static_cast<double>(r);
  return {stats.mu / rr, stats.evpv / rr, stats.vhm / (rr * rr)};
}

}  // namespace tdvmm
