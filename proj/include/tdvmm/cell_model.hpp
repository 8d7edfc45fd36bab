#pragma once

// TD-MAC cell characterization and input-weighted cell error statistics.
//
// All error quantities are expressed in delay steps (one step = the ideal
// delay increment of a single unit of x*w at redundancy R = 1).

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tdvmm {

// Dense (x, w) table. Rows are indexed by the activation value x in
// [0, 2^B - 1], columns by the weight value w (binary fixtures use w in {0,1}).
class CellTable {
 public:
  CellTable() = default;
  CellTable(std::size_t x_levels, std::size_t w_levels, double fill = 0.0);
  static CellTable from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t x_levels() const { return x_levels_; }
  std::size_t w_levels() const { return w_levels_; }

  double operator()(std::size_t x, std::size_t w) const { return data_[x * w_levels_ + w]; }
  double& operator()(std::size_t x, std::size_t w) { return data_[x * w_levels_ + w]; }

 private:
  std::size_t x_levels_ = 0;
  std::size_t w_levels_ = 0;
  std::vector<double> data_;
};

struct CellAreaParams {
  double cpp = 0.0;     // contacted poly pitch [m]
  double h_cell = 0.0;  // standard-cell height [m]
};

// Characterization of one 1-by-B TD-MAC cell. Stands in for circuit
// simulation results; construct through make() or load_cell_spec() so that
// the invariants are checked.
struct CellSpec {
  int bit_width = 1;
  CellTable inl;    // systematic delay error [delay steps]
  CellTable sigma;  // mismatch standard deviation [delay steps]
  double e_op = 0.0;        // energy per evaluation at R = 1 [J]
  double e_op_per_r = 0.0;  // marginal energy per additional unit of R [J]
  double d_step = 0.0;      // unit delay step [s]
  double d_max = 0.0;       // full-scale per-cell delay at R = 1 [s]
  CellAreaParams area;

  std::size_t x_levels() const { return std::size_t{1} << bit_width; }

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

CellSpec load_cell_spec(const std::filesystem::path& path);
CellSpec parse_cell_spec(const std::string& json_text);

// Joint input statistics: x ~ px, w independent of x.
struct InputDistribution {
  std::vector<double> px;
  // Probability of each weight level; binary weights give {1 - pw, pw}.
  std::vector<double> pw_levels;

  static InputDistribution binary(std::vector<double> px, double pw);
  // x uniform over [0, 2^B - 1].
  static InputDistribution uniform(int bit_width, double pw);

  double weight_density() const { return pw_levels.size() > 1 ? pw_levels[1] : 0.0; }
  void validate() const;
};

struct CellErrorStats {
  double mu = 0.0;    // expected INL [steps]
  double evpv = 0.0;  // expected per-input variance [steps^2]
  double vhm = 0.0;   // variance of INL means [steps^2]

  double variance() const { return evpv + vhm; }
};

// Efficiency metric SNR / sqrt(E). Invariant under cascading R cells,
// which multiplies the SNR by sqrt(R) and the energy by R.
double esnr(double snr_cell, double e_op);

// Combines per-input cell statistics with the input distribution through
// the laws of total expectation and total variance. VHM is the variance of
// the INL (E[INL^2] - E[INL]^2); it equals E[INL^2] only when the mean INL
// is zero.
CellErrorStats cell_error_stats(const CellSpec& spec, const InputDistribution& dist);

// Redundancy scaling: mu / r, evpv / r, vhm / r^2. Mismatch of redundant
// sub-cells is treated as uncorrelated, so the 1/R law for EVPV is exact
// here.
CellErrorStats scale_with_redundancy(const CellErrorStats& stats, int r);

}  // namespace tdvmm
