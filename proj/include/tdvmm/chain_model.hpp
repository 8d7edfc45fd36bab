#pragma once

// Compute-chain error propagation, redundancy sizing, and TD energy/area/
// latency models.

#include "tdvmm/cell_model.hpp"

namespace tdvmm {

struct ChainErrorStats {
  int n = 1;
  int r = 1;
  double mu = 0.0;        // [steps]; assumed calibrated away downstream
  double variance = 0.0;  // [steps^2]
  double sigma = 0.0;     // sqrt(variance)
};

enum class BudgetMode { kPrecise, kRelaxed };

// Maximum tolerated chain error standard deviation, in delay steps.
struct ErrorBudget {
  BudgetMode mode = BudgetMode::kPrecise;
  double sigma_max = 0.5 / 3.0;

  // 3 sigma <= 0.5 keeps a Gaussian error inside the rounding interval.
  static ErrorBudget precise();
  static ErrorBudget relaxed(double sigma_max);
};

inline constexpr int kDefaultRedundancyCap = 1024;

// Scales the cell statistics by r, then accumulates n independent cells:
// mu = n * mu_cell, variance = n * (evpv + vhm).
ChainErrorStats chain_stats(const CellErrorStats& cell, int n, int r);

// Smallest R >= 1 such that chain_stats(cell, n, R).sigma <= budget.sigma_max.
// The mean error is not part of the check. Throws InfeasibleError when the
// answer exceeds `cap`.
int solve_redundancy(const CellErrorStats& cell, int n, const ErrorBudget& budget,
                     int cap = kDefaultRedundancyCap);

// Expected cell energy per MAC at redundancy r: e_op + (r - 1) * e_op_per_r.
double cell_energy_at_r(const CellSpec& spec, int r);

// Energy per MAC: cell energy plus the TDC conversion amortized over n.
double td_mac_energy(double cell_energy_at_r, double e_tdc, int n);

// Cell area (9B + 7R(2^(B+1) - 1)) * CPP * H_cell. The second factor counts
// the TD-AND/TD-NAND sub-cells; one diffusion break per two sub-cells.
double td_cell_area(int b, int r, double cpp, double h_cell);

// Serial traversal of n cells of r sub-cascades at full-scale delay, then
// TDC conversion. Throughput of m parallel chains is n * m / latency.
double td_latency(int n, int r, const CellSpec& spec, double tdc_time);

}  // namespace tdvmm
