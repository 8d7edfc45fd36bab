#pragma once

// Table-driven digital adder-tree VMM baseline. The table holds post-layout
// characterization per (n, b): energy per 1-by-B MAC, array area, clock.
// Digital results are exact, so the model carries no error term.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tdvmm {

struct DigitalEntry {
  int n = 0;
  int b = 0;
  double energy_per_mac = 0.0;  // [J]
  double area = 0.0;            // whole array of length n [m^2]
  double f_clk = 0.0;           // [Hz]
};

class DigitalTable {
 public:
  // Validates and sorts; throws IngestError on duplicates, non-positive
  // values, or a bit width with fewer than two distinct n.
  explicit DigitalTable(std::vector<DigitalEntry> entries);

  const std::vector<DigitalEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool has_bits(int b) const { return by_b_.contains(b); }
  int min_n(int b) const;
  int max_n(int b) const;

  // Exact at grid points, log-log linear in n between them. No
  // extrapolation: OutOfRangeError outside [min_n, max_n] or for unknown b.
  double energy_per_mac(int n, int b) const;
  double area(int n, int b) const;
  double f_clk(int n, int b) const;

 private:
  template <typename Field>
  double interpolate(int n, int b, Field field) const;

  std::vector<DigitalEntry> entries_;
  std::map<int, std::vector<DigitalEntry>> by_b_;
};

// Header: n,b,energy_per_mac_joules,area_m2,f_clk_hz
DigitalTable ingest_digital_table(const std::string& csv_text);
DigitalTable load_digital_table(const std::filesystem::path& path);

double digital_mac_energy(const DigitalTable& t, int n, int b);

// One full VMM per clock on each of m arrays: n * m * f_clk.
double digital_throughput(const DigitalTable& t, int n, int b, int m);

}  // namespace tdvmm
