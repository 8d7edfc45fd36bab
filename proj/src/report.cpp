// CSV table and SVG plot emission for sweep results.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "csv.hpp"
#include "json_util.hpp"
#include "tdvmm/errors.hpp"
#include "tdvmm/explorer.hpp"

namespace tdvmm {

namespace {

constexpr std::array<const char*, 20> kColumns = {
    "domain",       "n",
    "b",            "m",
    "mode",         "clip_bits",
    "status",       "energy_per_mac_joules",
    "throughput_mac_per_s", "area_per_mac_m2",
    "r",            "enob",
    "l_osc",        "tdc",
    "e_tdc_hybrid_joules", "e_tdc_sar_joules",
    "max_in",       "mu_chain_steps",
    "sigma_achieved_steps", "sigma_budget_steps"};

std::vector<SweepRow> sorted_rows(const SweepResult& result) {
  auto rows = result.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(to_string(a.domain), a.n, a.b, a.m, a.clip_bits) <
           std::make_tuple(to_string(b.domain), b.n, b.b, b.m, b.clip_bits);
  });
  return rows;
}

std::string num(double v) { return detail::format_double(v); }

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string sweep_csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) h += ',';
    h += kColumns[i];
  }
  return h;
}

std::string format_sweep_csv(const SweepResult& result) {
  if (result.rows.empty()) throw EmptySelectionError("sweep result has no rows");
  std::string out = sweep_csv_header() + "\n";
  for (const auto& row : sorted_rows(result)) {
    if (row.feasible && !(row.sigma_achieved <= row.sigma_budget)) {
      throw Error("row " + to_string(row.domain) + " n=" + std::to_string(row.n) +
                  " b=" + std::to_string(row.b) + " exceeds its error budget");
    }
    std::vector<std::string> f = {to_string(row.domain), std::to_string(row.n), std::to_string(row.b),
                                  std::to_string(row.m), to_string(row.mode),
                                  std::to_string(row.clip_bits), row.status};
    if (row.feasible) {
      const bool td = row.domain == Domain::kTd;
      f.insert(f.end(), {num(row.energy_per_mac), num(row.throughput), num(row.area_per_mac),
                         std::to_string(row.r), opt(row.enob), opt(row.l_osc),
                         td ? to_string(row.tdc) : "", opt(row.e_tdc_hybrid), opt(row.e_tdc_sar),
                         opt(row.max_in), td ? num(row.mu_chain) : "", num(row.sigma_achieved)});
    } else {
      f.insert(f.end(), 12, "");
    }
    f.push_back(num(row.sigma_budget));
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) out += ',';
      out += f[i];
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  write_file(path, format_sweep_csv(result));
}

SweepResult parse_sweep_csv(const std::string& text) {
  const std::string what = "sweep table";
  const auto t = detail::parse_csv(text, what);
  detail::expect_header(t, std::vector<std::string>(kColumns.begin(), kColumns.end()), what);
  SweepResult result;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& c = t.rows[i];
    const std::string where = what + " line " + std::to_string(t.line_numbers[i]);
    auto to_int = [&](const std::string& s) { return static_cast<int>(detail::parse_int(s, where)); };
    auto to_dbl = [&](const std::string& s) { return detail::parse_double(s, where); };
    SweepRow row;
    try {
      row.domain = parse_domain(c[0]);
      row.mode = parse_mode(c[4]);
    } catch (const ConfigError& e) {
      throw IngestError(where + ": " + e.what());
    }
    row.n = to_int(c[1]);
    row.b = to_int(c[2]);
    row.m = to_int(c[3]);
    row.clip_bits = to_int(c[5]);
    row.status = c[6];
    row.feasible = row.status == "ok";
    row.sigma_budget = to_dbl(c[19]);
    if (row.feasible) {
      row.energy_per_mac = to_dbl(c[7]);
      row.throughput = to_dbl(c[8]);
      row.area_per_mac = to_dbl(c[9]);
      row.r = to_int(c[10]);
      if (!c[11].empty()) row.enob = to_dbl(c[11]);
      if (!c[12].empty()) row.l_osc = detail::parse_int(c[12], where);
      if (c[13] == "hybrid") {
        row.tdc = TdcKind::kHybrid;
      } else if (c[13] == "sar") {
        row.tdc = TdcKind::kSar;
      }
      if (!c[14].empty()) row.e_tdc_hybrid = to_dbl(c[14]);
      if (!c[15].empty()) row.e_tdc_sar = to_dbl(c[15]);
      if (!c[16].empty()) row.max_in = detail::parse_int(c[16], where);
      if (!c[17].empty()) row.mu_chain = to_dbl(c[17]);
      row.sigma_achieved = to_dbl(c[18]);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw IoError(e.what());
  }
  try {
    return parse_sweep_csv(text);
  } catch (const Error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

PlotKind parse_plot_kind(const std::string& s) {
  if (s == "energy") return PlotKind::kEnergy;
  if (s == "throughput") return PlotKind::kThroughput;
  if (s == "area") return PlotKind::kArea;
  throw ConfigError("unknown plot kind '" + s + "' (expected energy, throughput or area)");
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::kEnergy:
      return "energy";
    case PlotKind::kThroughput:
      return "throughput";
    case PlotKind::kArea:
      return "area";
  }
  return "?";
}

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

std::string fx2(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, p);
}

const char* domain_color(Domain d) {
  switch (d) {
    case Domain::kTd:
      return "#1f77b4";
    case Domain::kAnalog:
      return "#d62728";
    case Domain::kDigital:
      return "#2ca02c";
  }
  return "#000000";
}

const char* bit_dash(int b) {
  static constexpr const char* kDashes[] = {"none", "8,4", "3,3", "10,3,2,3"};
  return kDashes[(b - 1) % 4];
}

double metric(const SweepRow& r, PlotKind k) {
  switch (k) {
    case PlotKind::kEnergy:
      return r.energy_per_mac;
    case PlotKind::kThroughput:
      return r.throughput;
    case PlotKind::kArea:
      return r.area_per_mac;
  }
  return 0.0;
}

const char* axis_label(PlotKind k) {
  switch (k) {
    case PlotKind::kEnergy:
      return "energy per MAC [J]";
    case PlotKind::kThroughput:
      return "throughput [MAC/s]";
    case PlotKind::kArea:
      return "area per MAC [m^2]";
  }
  return "";
}

}  // namespace

std::string render_plot(const SweepResult& result, PlotKind kind) {
  std::map<std::pair<std::string, int>, std::vector<std::pair<int, double>>> series;
  std::map<std::pair<std::string, int>, Domain> series_domain;
  for (const auto& row : sorted_rows(result)) {
    const double v = metric(row, kind);
    if (!row.feasible || !(v > 0.0)) continue;
    const auto key = std::make_pair(to_string(row.domain), row.b);
    series[key].emplace_back(row.n, v);
    series_domain[key] = row.domain;
  }
  if (series.empty()) throw EmptySelectionError("no feasible rows to plot");

  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& [key, pts] : series) {
    for (const auto& [n, v] : pts) {
      x_lo = std::min(x_lo, std::log10(static_cast<double>(n)));
      x_hi = std::max(x_hi, std::log10(static_cast<double>(n)));
      y_lo = std::min(y_lo, std::log10(v));
      y_hi = std::max(y_hi, std::log10(v));
    }
  }
  x_lo = std::floor(x_lo * std::log2(10.0)) / std::log2(10.0);
  x_hi = std::ceil(x_hi * std::log2(10.0)) / std::log2(10.0);
  if (x_hi <= x_lo) x_hi = x_lo + std::log10(2.0);
  y_lo = std::floor(y_lo);
  y_hi = std::ceil(y_hi);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + (lx - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double ly) { return kTop + (y_hi - ly) / (y_hi - y_lo) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx2(kWidth) << "\" height=\""
    << fx2(kHeight) << "\" viewBox=\"0 0 " << fx2(kWidth) << ' ' << fx2(kHeight)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << fx2(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << axis_label(kind) << " vs. array dimension</text>\n";
  s << "<rect x=\"" << fx2(kLeft) << "\" y=\"" << fx2(kTop) << "\" width=\"" << fx2(pw)
    << "\" height=\"" << fx2(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks at powers of two
  for (int e = static_cast<int>(std::lround(x_lo * std::log2(10.0)));
       e <= static_cast<int>(std::lround(x_hi * std::log2(10.0))); ++e) {
    const double x = px(e * std::log10(2.0));
    s << "<line x1=\"" << fx2(x) << "\" y1=\"" << fx2(kTop + ph) << "\" x2=\"" << fx2(x) << "\" y2=\""
      << fx2(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fx2(x) << "\" y=\"" << fx2(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << (std::int64_t{1} << e) << "</text>\n";
  }
  // y ticks at decades
  for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); ++e) {
    const double y = py(e);
    s << "<line x1=\"" << fx2(kLeft - 5) << "\" y1=\"" << fx2(y) << "\" x2=\"" << fx2(kLeft + pw)
      << "\" y2=\"" << fx2(y) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << fx2(kLeft - 8) << "\" y=\"" << fx2(y + 4) << "\" text-anchor=\"end\">1e" << e
      << "</text>\n";
  }
  s << "<text x=\"" << fx2(kLeft + pw / 2) << "\" y=\"" << fx2(kHeight - 15)
    << "\" text-anchor=\"middle\">array dimension N</text>\n";
  s << "<text transform=\"translate(18," << fx2(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << axis_label(kind) << "</text>\n";

  int legend_row = 0;
  for (const auto& [key, pts] : series) {
    const Domain d = series_domain.at(key);
    s << "<polyline class=\"series\" data-domain=\"" << key.first << "\" data-b=\"" << key.second
      << "\" fill=\"none\" stroke=\"" << domain_color(d) << "\" stroke-width=\"1.5\"";
    if (std::string(bit_dash(key.second)) != "none") {
      s << " stroke-dasharray=\"" << bit_dash(key.second) << "\"";
    }
    s << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) s << ' ';
      s << fx2(px(std::log10(static_cast<double>(pts[i].first)))) << ','
        << fx2(py(std::log10(pts[i].second)));
    }
    s << "\"/>\n";
    const double ly = kTop + 10 + 18 * legend_row++;
    const double lx = kLeft + pw + 12;
    s << "<line x1=\"" << fx2(lx) << "\" y1=\"" << fx2(ly) << "\" x2=\"" << fx2(lx + 30) << "\" y2=\""
      << fx2(ly) << "\" stroke=\"" << domain_color(d) << "\" stroke-width=\"1.5\"";
    if (std::string(bit_dash(key.second)) != "none") {
      s << " stroke-dasharray=\"" << bit_dash(key.second) << "\"";
    }
    s << "/>\n";
    s << "<text x=\"" << fx2(lx + 36) << "\" y=\"" << fx2(ly + 4) << "\">" << key.first << " 1-by-"
      << key.second << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const SweepResult& result, PlotKind kind, const std::filesystem::path& path) {
  write_file(path, render_plot(result, kind));
}

}  // namespace tdvmm
