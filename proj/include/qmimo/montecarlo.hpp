#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmimo/channel.hpp"
#include "qmimo/precoding.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

enum class SimMode {
  kTrueQuantizer,   // Lloyd-Max codebooks applied to the sampled signals
  kBussgangLinear,  // converters replaced by gain + independent Gaussian noise
  kPerTermAnalytic, // per-realization power terms, no symbol sampling
};

std::string_view to_string(SimMode mode);
/// Accepts "true-quantizer", "bussgang-linear", "per-term-analytic".
SimMode parse_sim_mode(std::string_view text);

/// Raised when a Monte Carlo run cannot complete.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-user received power split into signal, multiuser interference,
/// DAC noise, ADC noise and thermal noise, after both converters.
struct TermBreakdown {
  double signal = 0.0;
  double interference = 0.0;
  double dac_noise = 0.0;
  double adc_noise = 0.0;
  double thermal_noise = 0.0;

  double siqnr() const {
    return signal / (interference + dac_noise + adc_noise + thermal_noise);
  }
  double total() const {
    return signal + interference + dac_noise + adc_noise + thermal_noise;
  }
};

/// Expectations over symbols, thermal noise and quantization noise for one
/// channel draw under the linearized converter model.
std::vector<TermBreakdown> per_term_breakdown(const ChannelRealization& channel,
                                              const ZfPrecoder& precoder,
                                              double rho_da, double rho_ad,
                                              double noise_power);
/// Same, with distortion factors taken from the config's resolutions.
std::vector<TermBreakdown> per_term_breakdown(const ChannelRealization& channel,
                                              const ZfPrecoder& precoder,
                                              const SystemConfig& cfg);

struct ChainSamples {
  ChannelRealization channel;
  CMatrix symbols;   // T×M
  CMatrix received;  // T×M, after the ADC
};

/// Runs s → ZF → DAC → H → +n → ADC once for cfg.noise_power.
/// `mode` must be kTrueQuantizer or kBussgangLinear.
ChainSamples simulate_chain(const SystemConfig& cfg, SimMode mode,
                            int symbols_per_trial, RngStream& rng,
                            int max_resamples = 8);

/// Per-user SIQNR from a symbol batch: g = E{y s*}/E{|s|²}, signal |g|²E{|s|²},
/// everything else E{|y - g s|²}.
std::vector<double> empirical_siqnr(const CMatrix& symbols,
                                    const CMatrix& received);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::vector<std::vector<double>> siqnr;  // [snr point][user]
  std::vector<double> rate;                // [snr point], mean over users
};

/// One channel realization evaluated at every noise power. Draws from `rng`
/// are identical for any list of noise powers, so a point's result does not
/// depend on which other points are evaluated with it.
TrialRecord simulate_trial(const SystemConfig& cfg,
                           std::span<const double> noise_powers, SimMode mode,
                           int symbols_per_trial, RngStream& rng,
                           int max_resamples = 8);

struct SimOptions {
  int n_trials = 500;
  int symbols_per_trial = 2000;
  SimMode mode = SimMode::kTrueQuantizer;
  std::uint64_t master_seed = 1;
  int workers = 1;
  int max_resamples = 8;
};

struct SimEstimate {
  double mean_rate = 0.0;
  double standard_error = 0.0;  // NaN for a single trial
  int n_trials = 0;
  SimMode mode = SimMode::kTrueQuantizer;
};

/// Trial i uses substream i of the master seed and trials are reduced in
/// index order, so the result is independent of the worker count.
SimEstimate estimate_rate(const SystemConfig& cfg, const SimOptions& options,
                          std::vector<TrialRecord>* records = nullptr);

/// estimate_rate over a list of linear SNRs with shared draws per trial.
/// cfg.noise_power is ignored; each point uses total_power / snr.
std::vector<SimEstimate> estimate_rate_curve(
    const SystemConfig& cfg, std::span<const double> snrs,
    const SimOptions& options, std::vector<TrialRecord>* records = nullptr);

struct ConvergenceRow {
  int n_antennas = 0;
  int n_users = 0;
  int realizations = 0;
  double mean_signal = 0.0;
  double mean_dac_noise = 0.0;
  double mean_adc_noise = 0.0;
  double limit_signal = 0.0;
  double limit_dac_noise = 0.0;
  double limit_adc_noise = 0.0;
  double max_interference_ratio = 0.0;  // max over draws and users of I/S
  double deviation = 0.0;  // max relative gap of the ensemble means
};

/// Large-system limits of S, Q1 and Q2 at the config's β and SNR.
TermBreakdown asymptotic_terms(double rho_da, double rho_ad, double beta,
                               double total_power, double noise_power);

/// Ensemble-mean power terms versus their large-system limits for several
/// antenna counts at the template's user load.
std::vector<ConvergenceRow> convergence_study(const SystemConfig& base,
                                              std::span<const int> n_antennas,
                                              int realizations,
                                              std::uint64_t master_seed,
                                              int workers = 1);

}  // namespace qmimo
