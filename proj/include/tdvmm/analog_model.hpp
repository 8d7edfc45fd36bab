#pragma once

// Charge-domain VMM model: MAC energy, ADC energy/ENOB relations, survey
// ingestion with envelope fitting, and capacitor-averaging redundancy.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tdvmm/chain_model.hpp"

namespace tdvmm {

struct AnalogParams {
  double e_cap = 0.0;          // unit accumulation capacitor energy per op at R = 1 [J]
  double e_logic = 0.0;        // pass-gate / logic energy per op [J]
  double sigma_cap_rel = 0.0;  // relative unit-capacitor mismatch
  int m_shared = 8;            // chains sharing one ADC
  double cell_area = 0.0;      // unit capacitor + pass gate [m^2], replicated R times

  void validate() const;
};

AnalogParams load_analog_params(const std::filesystem::path& path);
AnalogParams parse_analog_params(const std::string& json_text);

struct AdcSurveyRecord {
  double enob = 0.0;
  double energy_per_conv = 0.0;  // [J]
  double sample_rate = 0.0;      // [Hz]
  double area = 0.0;             // [m^2]
};

// Header: enob,energy_per_conv_joules,sample_rate_hz,area_m2
std::vector<AdcSurveyRecord> read_adc_survey(const std::filesystem::path& path);
std::vector<AdcSurveyRecord> parse_adc_survey(const std::string& csv_text);

// Best sample rate available at a given resolution. Points are sorted by
// ENOB and the rate is non-increasing in ENOB: a design offering more bits
// also serves any lower requirement.
class ThroughputEnvelope {
 public:
  struct Point {
    double enob = 0.0;
    double sample_rate = 0.0;
  };

  ThroughputEnvelope() = default;
  explicit ThroughputEnvelope(std::vector<Point> bin_maxima);

  // Throws OutOfRangeError above the highest surveyed resolution.
  double operator()(double enob) const;
  double max_enob() const;
  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<Point> points_;
};

struct AdcEnvelope {
  double k1 = 0.0;  // [J per ENOB bit]
  double k2 = 0.0;  // [J]
  ThroughputEnvelope throughput_fit;
  double area_pick = 0.0;  // [m^2]

  // Records retained after the sample-rate filter, kept for reporting.
  std::size_t survivors = 0;
};

// E = k1 * ENOB + k2 * 4^ENOB
double adc_energy(double enob, double k1, double k2);

// (SNR_dB - 1.76) / 6.02
double enob_from_snr(double snr_db);

inline constexpr double kEnvelopeBinWidth = 0.5;
inline constexpr double kThroughputEnergyFactor = 3.0;
inline constexpr double kAreaMinMacs = 100.0;

// Lower-envelope fit of the survey:
//  1. drop records with sample_rate < min_rate;
//  2. bin by ENOB (0.5-bit bins) and keep the minimum-energy design per bin;
//  3. non-negative least squares of k1, k2 on those minima, in relative error;
//  4. scale (k1, k2) down so the curve touches the lowest bin minimum, which
//     places the curve at or below every surviving record.
// The throughput envelope keeps the fastest design per bin among records
// within 3x of the fitted energy; area_pick is the smallest such design that
// also resolves a 100-MAC array.
AdcEnvelope fit_adc_envelope(std::span<const AdcSurveyRecord> records, double min_rate);

void write_adc_envelope(const AdcEnvelope& env, const std::filesystem::path& path);
AdcEnvelope read_adc_envelope(const std::filesystem::path& path);
std::string adc_envelope_to_json(const AdcEnvelope& env);
AdcEnvelope adc_envelope_from_json(const std::string& text);

// r * e_cap + e_logic + e_adc / n
double analog_mac_energy(const AnalogParams& p, double e_adc, int n, int r);

// Mismatch of the accumulated charge in LSB-equivalents.
double analog_array_sigma(const AnalogParams& p, int n, int r);

// Minimal R with analog_array_sigma(p, n, R) <= sigma_max.
int solve_analog_redundancy(const AnalogParams& p, int n, double sigma_max,
                            int cap = kDefaultRedundancyCap);

// ADC resolution needed to keep an output of `full_scale` LSBs at the given
// noise level: SNR = 20 log10(full_scale / sigma), then ENOB rounded up to
// the next half bit. Clamped to 0 when the SNR is below 1.76 dB.
double required_enob(double full_scale, double sigma_max);

}  // namespace tdvmm
