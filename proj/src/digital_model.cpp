#include "tdvmm/digital_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "csv.hpp"
#include "json_util.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

DigitalTable::DigitalTable(std::vector<DigitalEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw IngestError("digital table is empty");
  std::sort(entries_.begin(), entries_.end(), [](const DigitalEntry& a, const DigitalEntry& b) {
    return std::tie(a.b, a.n) < std::tie(b.b, b.n);
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.n < 1 || e.b < 1 || !(e.energy_per_mac > 0.0) || !(e.area > 0.0) || !(e.f_clk > 0.0) ||
        !std::isfinite(e.energy_per_mac * e.area * e.f_clk)) {
      throw IngestError("digital table entry (n=" + std::to_string(e.n) + ", b=" +
                        std::to_string(e.b) + ") must have positive values");
    }
    if (i > 0 && entries_[i - 1].n == e.n && entries_[i - 1].b == e.b) {
      throw IngestError("duplicate digital table entry (n=" + std::to_string(e.n) +
                        ", b=" + std::to_string(e.b) + ")");
    }
    by_b_[e.b].push_back(e);
  }
  for (const auto& [b, rows] : by_b_) {
    if (rows.size() < 2) {
      throw IngestError("digital table needs at least 2 array sizes for b=" + std::to_string(b));
    }
  }
}

int DigitalTable::min_n(int b) const {
  if (!has_bits(b)) throw OutOfRangeError("digital table has no b=" + std::to_string(b));
  return by_b_.at(b).front().n;
}

int DigitalTable::max_n(int b) const {
  if (!has_bits(b)) throw OutOfRangeError("digital table has no b=" + std::to_string(b));
  return by_b_.at(b).back().n;
}

template <typename Field>
double DigitalTable::interpolate(int n, int b, Field field) const {
  const auto it_b = by_b_.find(b);
  if (it_b == by_b_.end()) throw OutOfRangeError("digital table has no b=" + std::to_string(b));
  const auto& rows = it_b->second;
  if (n < rows.front().n || n > rows.back().n) {
    throw OutOfRangeError("n=" + std::to_string(n) + " outside digital grid [" +
                          std::to_string(rows.front().n) + ", " + std::to_string(rows.back().n) +
                          "] for b=" + std::to_string(b));
  }
  const auto hi = std::lower_bound(rows.begin(), rows.end(), n,
                                   [](const DigitalEntry& e, int v) { return e.n < v; });
  if (hi->n == n) return field(*hi);
  const auto lo = std::prev(hi);
  const double t = std::log(static_cast<double>(n) / lo->n) / std::log(static_cast<double>(hi->n) / lo->n);
  return std::exp(std::log(field(*lo)) + t * (std::log(field(*hi)) - std::log(field(*lo))));
}

double DigitalTable::energy_per_mac(int n, int b) const {
  return interpolate(n, b, [](const DigitalEntry& e) { return e.energy_per_mac; });
}

double DigitalTable::area(int n, int b) const {
  return interpolate(n, b, [](const DigitalEntry& e) { return e.area; });
}

double DigitalTable::f_clk(int n, int b) const {
  return interpolate(n, b, [](const DigitalEntry& e) { return e.f_clk; });
}

DigitalTable ingest_digital_table(const std::string& csv_text) {
  const std::string what = "digital table";
  const auto t = detail::parse_csv(csv_text, what);
  detail::expect_header(t, {"n", "b", "energy_per_mac_joules", "area_m2", "f_clk_hz"}, what);
  std::vector<DigitalEntry> entries;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = what + " line " + std::to_string(t.line_numbers[i]);
    const auto n = detail::parse_int(row[0], where);
    const auto b = detail::parse_int(row[1], where);
    if (n < 1 || n > std::numeric_limits<int>::max() || b < 1 || b > 30) {
      throw IngestError(where + ": n and b must be positive integers");
    }
    entries.push_back({static_cast<int>(n), static_cast<int>(b), detail::parse_double(row[2], where),
                       detail::parse_double(row[3], where), detail::parse_double(row[4], where)});
  }
  return DigitalTable(std::move(entries));
}

DigitalTable load_digital_table(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  try {
    return ingest_digital_table(text);
  } catch (const Error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

double digital_mac_energy(const DigitalTable& t, int n, int b) { return t.energy_per_mac(n, b); }

double digital_throughput(const DigitalTable& t, int n, int b, int m) {
  if (m < 1) throw DomainError("m must be >= 1");
  return static_cast<double>(n) * m * t.f_clk(n, b);
}

}  // namespace tdvmm
