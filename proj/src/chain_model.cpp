#include "tdvmm/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "tdvmm/errors.hpp"

namespace tdvmm {

ErrorBudget ErrorBudget::precise() { return {BudgetMode::kPrecise, 0.5 / 3.0}; }

ErrorBudget ErrorBudget::relaxed(double sigma_max) {
  if (!(sigma_max > 0.0)) throw DomainError("relaxed sigma_max must be > 0");
  return {BudgetMode::kRelaxed, sigma_max};
}

ChainErrorStats chain_stats(const CellErrorStats& cell, int n, int r) {
  if (n < 1) throw DomainError("chain length n must be >= 1");
  const CellErrorStats scaled = scale_with_redundancy(cell, r);
  ChainErrorStats out;
  out.n = n;
  out.r = r;
  out.mu = n * scaled.mu;
  out.variance = n * (scaled.evpv + scaled.vhm);
  out.sigma = std::sqrt(out.variance);
  return out;
}

int solve_redundancy(const CellErrorStats& cell, int n, const ErrorBudget& budget, int cap) {
  if (!(budget.sigma_max > 0.0)) throw DomainError("budget sigma_max must be > 0");
  if (n < 1) throw DomainError("chain length n must be >= 1");
  if (cap < 1) throw DomainError("redundancy cap must be >= 1");

  auto meets = [&](int r) { return chain_stats(cell, n, r).sigma <= budget.sigma_max; };

  // n*evpv/R + n*vhm/R^2 <= s^2  <=>  s^2 R^2 - n*evpv R - n*vhm >= 0.
  // The positive root seeds the search; the exact predicate decides.
  const double s2 = budget.sigma_max * budget.sigma_max;
  const double a = n * cell.evpv;
  const double c = n * cell.vhm;
  const double root = (a + std::sqrt(a * a + 4.0 * s2 * c)) / (2.0 * s2);
  if (!std::isfinite(root) || root > static_cast<double>(cap) + 1.0) {
    if (!meets(cap)) {
      throw InfeasibleError("redundancy exceeds cap " + std::to_string(cap) + " for n=" +
                            std::to_string(n) + ", sigma_max=" + std::to_string(budget.sigma_max));
    }
  }
  int r = static_cast<int>(std::clamp(std::ceil(root), 1.0, static_cast<double>(cap)));
  while (r > 1 && meets(r - 1)) --r;
  while (!meets(r)) {
    if (r >= cap) {
      throw InfeasibleError("redundancy exceeds cap " + std::to_string(cap) + " for n=" +
                            std::to_string(n) + ", sigma_max=" + std::to_string(budget.sigma_max));
    }
    ++r;
  }
  return r;
}

double cell_energy_at_r(const CellSpec& spec, int r) {
  if (r < 1) throw DomainError("redundancy r must be >= 1");
  return spec.e_op + static_cast<double>(r - 1) * spec.e_op_per_r;
}

double td_mac_energy(double cell_energy_at_r, double e_tdc, int n) {
  if (n < 1) throw DomainError("chain length n must be >= 1");
  return cell_energy_at_r + e_tdc / static_cast<double>(n);
}

double td_cell_area(int b, int r, double cpp, double h_cell) {
  if (b < 1 || b > 30) throw DomainError("bit width b must be in [1, 30]");
  if (r < 1) throw DomainError("redundancy r must be >= 1");
  const double subcells = static_cast<double>((std::int64_t{1} << (b + 1)) - 1);
  return (9.0 * b + 7.0 * r * subcells) * cpp * h_cell;
}

double td_latency(int n, int r, const CellSpec& spec, double tdc_time) {
  if (n < 1 || r < 1) throw DomainError("td_latency requires n >= 1 and r >= 1");
  if (tdc_time < 0.0) throw DomainError("tdc_time must be >= 0");
  return static_cast<double>(n) * r * spec.d_max + tdc_time;
}

}  // namespace tdvmm
