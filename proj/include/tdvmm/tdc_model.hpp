#pragma once

// Energy, sizing, and timing models for the two TDC architectures:
//  - hybrid: ring oscillator of L_osc TD-AND cells clocking a gray-code MSB
//    counter shared by M chains, plus a small per-chain SAR for the LSBs;
//  - SAR: binary search by successively delaying the faster edge, with the
//    reference pre-delayed to max_in / 2 and shared by M chains.

#include <cstdint>
#include <filesystem>
#include <string>

namespace tdvmm {

struct TdcParams {
  double e_td_and = 0.0;    // per TD-AND cell transition [J]
  double e_sample = 0.0;    // per sampling-register bit [J]
  double e_cnt = 0.0;       // shared counter, per count event [J]
  double e_cnt_load = 0.0;  // per-chain MSB register load per count, incl. reference delay [J]
  double t_unit = 0.0;      // unit delay [s]

  // Area figures; only used by the explorer's area-per-MAC output.
  double a_td_and = 0.0;   // [m^2]
  double a_sample = 0.0;   // [m^2]
  double a_counter = 0.0;  // [m^2]

  void validate() const;
};

TdcParams load_tdc_params(const std::filesystem::path& path);
TdcParams parse_tdc_params(const std::string& json_text);

struct TdcRange {
  std::int64_t max_in = 1;  // full-scale TDC input [delay steps]
  int range_bits = 1;       // ceil(log2(max_in + 1))
};

// Number of SAR bits resolving the residue inside one MSB step of 2 * l_osc
// unit delays: ceil(1 + log2(l_osc)).
int hybrid_sar_bits(std::int64_t l_osc);

double hybrid_tdc_energy(const TdcParams& p, std::int64_t n, int r, int m, std::int64_t l_osc);

// Continuous minimizer of the hybrid energy with the ceilings dropped. May be
// negative for tiny chains; used only as a starting point and as a sanity
// reference.
double losc_closed_form(const TdcParams& p, std::int64_t n, int r, int m);

// Integer L in [1, ceil(n*r/2)] minimizing hybrid_tdc_energy; ties go to
// the smaller L.
std::int64_t optimal_losc(const TdcParams& p, std::int64_t n, int r, int m);

double sar_tdc_energy(const TdcParams& p, int b_range, int m);

// Output range n * (2^b - 1) right-shifted by clip_bits.
TdcRange reduced_range(std::int64_t n, int b, int clip_bits);
TdcRange make_range(std::int64_t max_in);

// Conversion time after the chain edge arrives: one oscillator period plus
// the LSB SAR settle time.
double hybrid_conversion_time(const TdcParams& p, std::int64_t l_osc);
// Sum of the binary-search delays 2^(b-1) + ... + 1.
double sar_conversion_time(const TdcParams& p, int b_range);

// Per-chain silicon area of each architecture; shared parts divided by m.
double hybrid_tdc_area(const TdcParams& p, std::int64_t n, int r, int m, std::int64_t l_osc);
double sar_tdc_area(const TdcParams& p, int b_range, int m);

}  // namespace tdvmm
