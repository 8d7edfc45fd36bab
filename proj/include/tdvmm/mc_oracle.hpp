#pragma once

// Behavioral Monte-Carlo model of TD compute chains and the hybrid TDC.
// Serves as the independent reference for the analytic chain statistics.
//
// Chain model: each of the n positions receives (x, w) and is built from r
// cascaded sub-cells. The nonlinearity INL(x, w) stems from the path
// difference and is paid once per position; every sub-cell adds independent
// Gaussian mismatch with standard deviation sigma(x, w). Measured in delay
// steps of the r-cascaded cell the position error is
//     (INL(x, w) + sum_k eps_k) / r.
//
// RNG contract: SplitMix64 streams keyed by (seed, purpose, trial or chain
// instance, position[, x, w]). Every trial is a pure function of its key, so
// results do not depend on evaluation order or thread count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "tdvmm/cell_model.hpp"
#include "tdvmm/tdc_model.hpp"

namespace tdvmm {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal();

  // Derives an independent stream key from a parent key and a label.
  static std::uint64_t derive(std::uint64_t key, std::uint64_t label);

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

struct FixedInputs {
  std::vector<int> x;
  std::vector<int> w;
};

enum class MismatchMode {
  kStatic,  // offsets fixed per fabricated chain instance
  kFresh,   // new offsets on every evaluation
};

struct MonteCarloConfig {
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int n = 1;
  int r = 1;
  std::variant<InputDistribution, FixedInputs> inputs;
  MismatchMode mismatch = MismatchMode::kStatic;
  // Static mode: consecutive trials evaluated on the same chain instance.
  int evaluations_per_instance = 1;
  int histogram_bins = 64;
  int threads = 0;  // 0 = hardware concurrency

  void validate(const CellSpec& spec) const;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> counts;
};

struct EmpiricalStats {
  std::int64_t trials = 0;
  double mean = 0.0;      // [steps]
  double variance = 0.0;  // unbiased [steps^2]
  double sem = 0.0;       // standard error of the mean
  double skewness = 0.0;  // Gaussian-shape check
  Histogram histogram;
};

// Per-trial chain error (total delay minus ideal delay) in delay steps.
std::vector<double> simulate_chain_samples(const CellSpec& spec, const MonteCarloConfig& cfg);

EmpiricalStats summarize(const std::vector<double>& samples, int histogram_bins);

EmpiricalStats simulate_chain(const CellSpec& spec, const MonteCarloConfig& cfg);

// CSV `trial,error_delay_steps`.
void write_samples_csv(const std::vector<double>& samples, const std::filesystem::path& path);

struct TdcConversion {
  std::int64_t code = 0;
  bool saturated = false;
};

// Hybrid TDC behavior: an MSB counter advancing every 2 * l_osc unit delays
// and a SAR resolving the residue to whole steps. For in-range inputs the
// result is floor(readout); inputs outside [0, max_in] saturate.
TdcConversion simulate_tdc(double readout, const TdcRange& range, std::int64_t l_osc);

struct TimingStats {
  double mean = 0.0;  // [s]
  double max = 0.0;   // [s]
};

// Full-scale inputs (x = 2^B - 1, w = 1) on every position; measures the
// chain delay including INL and mismatch.
TimingStats simulate_full_scale_timing(const CellSpec& spec, int n, int r, std::int64_t trials,
                                       std::uint64_t seed);

}  // namespace tdvmm
