#include "tdvmm/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include "csv.hpp"
#include "tdvmm/errors.hpp"

namespace tdvmm {

namespace {

constexpr std::uint64_t kInputStream = 0x696e707574ULL;
constexpr std::uint64_t kMismatchStream = 0x6d69736d61ULL;
constexpr std::uint64_t kTimingStream = 0x74696d696eULL;

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    c[i] = acc;
  }
  c.back() = 1.0;
  return c;
}

int draw(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                    static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

int resolve_threads(int requested, std::int64_t work) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::int64_t>(t, std::max<std::int64_t>(1, work)));
}

// Runs body(begin, end) over [0, count) split into contiguous chunks.
template <typename Body>
void parallel_for(std::int64_t count, int threads, Body body) {
  const int t = resolve_threads(threads, count);
  if (t == 1) {
    body(std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const std::int64_t b = i * chunk;
    const std::int64_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back(body, b, e);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double SplitMix64::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  // Marsaglia polar method.
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  return u * f;
}

std::uint64_t SplitMix64::derive(std::uint64_t key, std::uint64_t label) {
  SplitMix64 g(key ^ (label * 0xd6e8feb86659fd93ULL));
  g.next();
  return g.next();
}

void MonteCarloConfig::validate(const CellSpec& spec) const {
  if (trials < 1) throw ConfigError("Monte-Carlo trials must be >= 1");
  if (n < 1 || r < 1) throw ConfigError("Monte-Carlo n and r must be >= 1");
  if (evaluations_per_instance < 1) throw ConfigError("evaluations_per_instance must be >= 1");
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
  if (const auto* dist = std::get_if<InputDistribution>(&inputs)) {
    dist->validate();
    if (dist->px.size() != spec.x_levels() || dist->pw_levels.size() != spec.inl.w_levels()) {
      throw ConfigError("input distribution does not match the cell dimensions");
    }
  } else {
    const auto& fixed = std::get<FixedInputs>(inputs);
    if (fixed.x.size() != static_cast<std::size_t>(n) || fixed.w.size() != static_cast<std::size_t>(n)) {
      throw ConfigError("fixed input vectors must have length n");
    }
    for (int i = 0; i < n; ++i) {
      if (fixed.x[i] < 0 || static_cast<std::size_t>(fixed.x[i]) >= spec.x_levels() ||
          fixed.w[i] < 0 || static_cast<std::size_t>(fixed.w[i]) >= spec.inl.w_levels()) {
        throw ConfigError("fixed input value outside the cell table");
      }
    }
  }
}

std::vector<double> simulate_chain_samples(const CellSpec& spec, const MonteCarloConfig& cfg) {
  cfg.validate(spec);
  const auto* dist = std::get_if<InputDistribution>(&cfg.inputs);
  const auto* fixed = std::get_if<FixedInputs>(&cfg.inputs);
  std::vector<double> cdf_x, cdf_w;
  if (dist) {
    cdf_x = cumulative(dist->px);
    cdf_w = cumulative(dist->pw_levels);
  }
  const std::uint64_t input_key = SplitMix64::derive(cfg.seed, kInputStream);
  const std::uint64_t mismatch_key = SplitMix64::derive(cfg.seed, kMismatchStream);
  const std::uint64_t w_levels = spec.inl.w_levels();
  const double inv_r = 1.0 / cfg.r;

  std::vector<double> samples(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t trial = begin; trial < end; ++trial) {
      const std::uint64_t trial_key = SplitMix64::derive(input_key, static_cast<std::uint64_t>(trial));
      const std::uint64_t instance =
          static_cast<std::uint64_t>(trial / cfg.evaluations_per_instance);
      const std::uint64_t instance_key = SplitMix64::derive(mismatch_key, instance);
      CompensatedSum err;
      for (int pos = 0; pos < cfg.n; ++pos) {
        int x = 0, w = 0;
        SplitMix64 in(SplitMix64::derive(trial_key, static_cast<std::uint64_t>(pos)));
        if (dist) {
          x = draw(cdf_x, in.uniform());
          w = draw(cdf_w, in.uniform());
        } else {
          x = fixed->x[pos];
          w = fixed->w[pos];
        }
        const double sigma = spec.sigma(x, w);
        double mismatch = 0.0;
        if (sigma > 0.0) {
          if (cfg.mismatch == MismatchMode::kStatic) {
            const std::uint64_t cell = (static_cast<std::uint64_t>(pos) * spec.x_levels() +
                                        static_cast<std::uint64_t>(x)) * w_levels +
                                       static_cast<std::uint64_t>(w);
            SplitMix64 mm(SplitMix64::derive(instance_key, cell));
            for (int k = 0; k < cfg.r; ++k) mismatch += mm.normal();
          } else {
            for (int k = 0; k < cfg.r; ++k) mismatch += in.normal();
          }
          mismatch *= sigma;
        }
        err.add((spec.inl(x, w) + mismatch) * inv_r);
      }
      samples[static_cast<std::size_t>(trial)] = err.value();
    }
  });
  return samples;
}

EmpiricalStats summarize(const std::vector<double>& samples, int histogram_bins) {
  if (samples.empty()) throw DomainError("no samples to summarize");
  if (histogram_bins < 1) throw DomainError("histogram_bins must be >= 1");
  EmpiricalStats s;
  s.trials = static_cast<std::int64_t>(samples.size());
  const double count = static_cast<double>(samples.size());

  CompensatedSum sum;
  for (double v : samples) sum.add(v);
  s.mean = sum.value() / count;

  CompensatedSum m2, m3;
  for (double v : samples) {
    const double d = v - s.mean;
    m2.add(d * d);
    m3.add(d * d * d);
  }
  s.variance = samples.size() > 1 ? m2.value() / (count - 1.0) : 0.0;
  s.sem = std::sqrt(s.variance / count);
  const double pop_var = m2.value() / count;
  s.skewness = pop_var > 0.0 ? (m3.value() / count) / std::pow(pop_var, 1.5) : 0.0;

  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.histogram.lo = *lo;
  s.histogram.hi = *hi;
  s.histogram.counts.assign(static_cast<std::size_t>(histogram_bins), 0);
  const double width = (*hi - *lo) / histogram_bins;
  for (double v : samples) {
    std::size_t bin = 0;
    if (width > 0.0) {
      bin = static_cast<std::size_t>(std::min<double>((v - *lo) / width, histogram_bins - 1));
    }
    ++s.histogram.counts[bin];
  }
  return s;
}

EmpiricalStats simulate_chain(const CellSpec& spec, const MonteCarloConfig& cfg) {
  return summarize(simulate_chain_samples(spec, cfg), cfg.histogram_bins);
}

void write_samples_csv(const std::vector<double>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "trial,error_delay_steps\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << i << ',' << detail::format_double(samples[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

TdcConversion simulate_tdc(double readout, const TdcRange& range, std::int64_t l_osc) {
  if (l_osc < 1) throw DomainError("l_osc must be >= 1");
  if (std::isnan(readout)) throw DomainError("TDC readout is NaN");
  TdcConversion out;
  const double max_in = static_cast<double>(range.max_in);
  if (readout < 0.0) {
    readout = 0.0;
    out.saturated = true;
  } else if (readout > max_in) {
    readout = max_in;
    out.saturated = true;
  }

  // Counter: completed oscillator periods before the chain edge arrives.
  const double msb_step = 2.0 * static_cast<double>(l_osc);
  const double periods = std::floor(readout / msb_step);
  const double residue = readout - periods * msb_step;

  // SAR: successive approximation of the residue, MSB first.
  const int bits = hybrid_sar_bits(l_osc);
  std::int64_t lsb = 0;
  for (int bit = bits - 1; bit >= 0; --bit) {
    const std::int64_t trial = lsb + (std::int64_t{1} << bit);
    if (residue >= static_cast<double>(trial)) lsb = trial;
  }
  out.code = static_cast<std::int64_t>(periods) * 2 * l_osc + lsb;
  return out;
}

TimingStats simulate_full_scale_timing(const CellSpec& spec, int n, int r, std::int64_t trials,
                                       std::uint64_t seed) {
  if (n < 1 || r < 1 || trials < 1) throw DomainError("timing simulation needs n, r, trials >= 1");
  const std::size_t x = spec.x_levels() - 1;
  const std::size_t w = 1;
  const double inl = spec.inl(x, w);
  const double sigma = spec.sigma(x, w);
  const std::uint64_t key = SplitMix64::derive(seed, kTimingStream);

  CompensatedSum sum;
  TimingStats out;
  out.max = -std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < trials; ++t) {
    SplitMix64 g(SplitMix64::derive(key, static_cast<std::uint64_t>(t)));
    CompensatedSum delay;
    for (int pos = 0; pos < n; ++pos) {
      double mismatch = 0.0;
      for (int k = 0; k < r; ++k) mismatch += g.normal();
      // r sub-cascades at full scale; errors in steps of r * d_step.
      delay.add(r * spec.d_max + (inl + sigma * mismatch) * spec.d_step);
    }
    sum.add(delay.value());
    out.max = std::max(out.max, delay.value());
  }
  out.mean = sum.value() / static_cast<double>(trials);
  return out;
}

}  // namespace tdvmm
