#include "qmimo/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"
#include "qmimo/analysis.hpp"
#include "qmimo/quantization.hpp"

namespace qmimo {
namespace {

struct ChannelDraw {
  ChannelRealization channel;
  ZfPrecoder precoder;
};

ChannelDraw draw_channel(const SystemConfig& cfg, RngStream& rng,
                         int max_resamples) {
  for (int attempt = 0; attempt <= max_resamples; ++attempt) {
    ChannelRealization channel = generate_channel(cfg, rng);
    try {
      ZfPrecoder precoder = zf_precoder(channel, cfg.total_power);
      return {std::move(channel), std::move(precoder)};
    } catch (const SingularChannel&) {
    }
  }
  throw SimulationError("channel stayed singular after " +
                        std::to_string(max_resamples) + " resamples");
}

// Everything in a trial that does not depend on the noise power.
struct PreparedTrial {
  ChannelDraw draw;
  CMatrix symbols;      // T×M
  CMatrix unit_noise;   // T×M, CN(0, 1)
  CMatrix noiseless;    // T×M, H x_q before thermal noise
  CMatrix adc_noise;    // T×M, CN(0, 1); linear mode only
  RVector signal_power; // per user, (1-ρ_DA)Σ_j|h_kᵀp_j|² + ρ_DA h_kᵀdiag(PPᴴ)h_k*
};

PreparedTrial prepare_trial(const SystemConfig& cfg, SimMode mode, int symbols,
                            RngStream& rng, int max_resamples) {
  if (symbols < 1) {
    throw std::invalid_argument("symbols_per_trial must be positive");
  }
  PreparedTrial t;
  t.draw = draw_channel(cfg, rng, max_resamples);
  const CMatrix& h = t.draw.channel.h;
  const CMatrix& p = t.draw.precoder.p;
  t.symbols = sample_symbol_batch(cfg.n_users, symbols, rng);
  t.unit_noise = CMatrix(symbols, cfg.n_users);
  rng.fill_complex_gaussian(t.unit_noise, 1.0);

  CMatrix x = t.symbols * p.transpose();  // T×N
  if (mode == SimMode::kTrueQuantizer) {
    if (!cfg.dac.is_ideal()) {
      apply_dac_columns(x, lloyd_max_codebook(cfg.dac.bits()));
    }
  } else {
    const double rho_da = distortion_factor(cfg.dac);
    apply_bussgang_columns(x, BussgangLinearModel::dac(rho_da),
                           diag_of_gram(t.draw.precoder), rng);
    const double rho_ad = distortion_factor(cfg.adc);
    const RVector leak = h.cwiseAbs2() * diag_of_gram(t.draw.precoder);
    t.signal_power = (1.0 - rho_da) * (h * p).rowwise().squaredNorm() +
                     rho_da * leak;
    if (rho_ad > 0.0) {
      t.adc_noise = CMatrix(symbols, cfg.n_users);
      rng.fill_complex_gaussian(t.adc_noise, 1.0);
    }
  }
  t.noiseless = x * h.transpose();
  return t;
}

CMatrix receive(const PreparedTrial& t, const SystemConfig& cfg, SimMode mode,
                double noise_power) {
  CMatrix y = t.noiseless + std::sqrt(noise_power) * t.unit_noise;
  if (cfg.adc.is_ideal()) return y;
  if (mode == SimMode::kTrueQuantizer) {
    apply_adc_columns(y, lloyd_max_codebook(cfg.adc.bits()));
    return y;
  }
  const auto model = BussgangLinearModel::adc(distortion_factor(cfg.adc));
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    const double power = t.signal_power[k] + noise_power;
    const double sd = std::sqrt(model.noise_scale * power);
    y.col(k) = model.gain * y.col(k) + sd * t.adc_noise.col(k);
  }
  return y;
}

double mean_rate(const std::vector<double>& siqnr) {
  double sum = 0.0;
  for (double g : siqnr) sum += std::log1p(g) / std::numbers::ln2;
  return sum / static_cast<double>(siqnr.size());
}

std::vector<TrialRecord> run_trials(const SystemConfig& cfg,
                                    std::span<const double> noise_powers,
                                    const SimOptions& options) {
  if (options.n_trials < 1) {
    throw std::invalid_argument("n_trials must be at least 1");
  }
  cfg.validate();
  const RngStream master(options.master_seed);
  std::vector<std::exception_ptr> errors;
  auto records = detail::parallel_map<TrialRecord>(
      static_cast<std::size_t>(options.n_trials), options.workers,
      [&](std::size_t i) {
        RngStream rng = master.substream(i);
        TrialRecord r =
            simulate_trial(cfg, noise_powers, options.mode,
                           options.symbols_per_trial, rng, options.max_resamples);
        r.trial = i;
        return r;
      },
      errors);

  std::size_t completed = 0;
  for (const auto& e : errors) completed += e ? 0 : 1;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& ex) {
      what = ex.what();
    } catch (...) {
    }
    throw SimulationError("trial " + std::to_string(i) + " failed: " + what +
                          " (" + std::to_string(completed) + " of " +
                          std::to_string(errors.size()) +
                          " trials completed)");
  }
  return records;
}

SimEstimate summarize(const std::vector<TrialRecord>& records, std::size_t point,
                      SimMode mode) {
  const double n = static_cast<double>(records.size());
  double sum = 0.0;
  for (const auto& r : records) sum += r.rate[point];
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& r : records) {
    const double d = r.rate[point] - mean;
    ss += d * d;
  }
  SimEstimate est;
  est.mean_rate = mean;
  est.n_trials = static_cast<int>(records.size());
  est.mode = mode;
  est.standard_error = records.size() > 1
                           ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n)
                           : std::numeric_limits<double>::quiet_NaN();
  return est;
}

}  // namespace

std::string_view to_string(SimMode mode) {
  switch (mode) {
    case SimMode::kTrueQuantizer: return "true-quantizer";
    case SimMode::kBussgangLinear: return "bussgang-linear";
    case SimMode::kPerTermAnalytic: return "per-term-analytic";
  }
  return "unknown";
}

SimMode parse_sim_mode(std::string_view text) {
  if (text == "true-quantizer") return SimMode::kTrueQuantizer;
  if (text == "bussgang-linear") return SimMode::kBussgangLinear;
  if (text == "per-term-analytic") return SimMode::kPerTermAnalytic;
  throw ConfigError("unknown simulation mode '" + std::string(text) + "'");
}

std::vector<TermBreakdown> per_term_breakdown(const ChannelRealization& channel,
                                              const ZfPrecoder& precoder,
                                              double rho_da, double rho_ad,
                                              double noise_power) {
  const CMatrix& h = channel.h;
  const CMatrix hp = h * precoder.p;  // M×M
  const RVector leak = h.cwiseAbs2() * diag_of_gram(precoder);
  const double a2 = (1.0 - rho_ad) * (1.0 - rho_ad);
  const double adc_scale = rho_ad * (1.0 - rho_ad);

  std::vector<TermBreakdown> out(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double own = std::norm(hp(k, k));
    double cross = 0.0;  // summed directly; ZF makes it vanish
    for (Eigen::Index j = 0; j < hp.cols(); ++j) {
      if (j != k) cross += std::norm(hp(k, j));
    }
    const double all = own + cross;
    auto& t = out[static_cast<std::size_t>(k)];
    t.signal = a2 * (1.0 - rho_da) * own;
    t.interference = a2 * (1.0 - rho_da) * cross;
    t.dac_noise = a2 * rho_da * leak[k];
    t.adc_noise = adc_scale * ((1.0 - rho_da) * all + noise_power +
                               rho_da * leak[k]);
    t.thermal_noise = a2 * noise_power;
  }
  return out;
}

std::vector<TermBreakdown> per_term_breakdown(const ChannelRealization& channel,
                                              const ZfPrecoder& precoder,
                                              const SystemConfig& cfg) {
  return per_term_breakdown(channel, precoder, distortion_factor(cfg.dac),
                            distortion_factor(cfg.adc), cfg.noise_power);
}

ChainSamples simulate_chain(const SystemConfig& cfg, SimMode mode,
                            int symbols_per_trial, RngStream& rng,
                            int max_resamples) {
  if (mode == SimMode::kPerTermAnalytic) {
    throw std::invalid_argument("simulate_chain: analytic mode has no samples");
  }
  PreparedTrial t =
      prepare_trial(cfg, mode, symbols_per_trial, rng, max_resamples);
  CMatrix y = receive(t, cfg, mode, cfg.noise_power);
  return {std::move(t.draw.channel), std::move(t.symbols), std::move(y)};
}

std::vector<double> empirical_siqnr(const CMatrix& symbols,
                                    const CMatrix& received) {
  if (symbols.rows() != received.rows() || symbols.cols() != received.cols()) {
    throw std::invalid_argument("empirical_siqnr: shape mismatch");
  }
  const double n = static_cast<double>(symbols.rows());
  std::vector<double> out(static_cast<std::size_t>(symbols.cols()));
  for (Eigen::Index k = 0; k < symbols.cols(); ++k) {
    const auto s = symbols.col(k);
    const auto y = received.col(k);
    const double s_power = s.squaredNorm();
    const cdouble g = s.dot(y) / s_power;  // Σ conj(s)·y
    const double signal = std::norm(g) * s_power / n;
    const double residual = (y - g * s).squaredNorm() / n;
    out[static_cast<std::size_t>(k)] = signal / residual;
  }
  return out;
}

TrialRecord simulate_trial(const SystemConfig& cfg,
                           std::span<const double> noise_powers, SimMode mode,
                           int symbols_per_trial, RngStream& rng,
                           int max_resamples) {
  TrialRecord rec;
  rec.siqnr.reserve(noise_powers.size());
  rec.rate.reserve(noise_powers.size());

  if (mode == SimMode::kPerTermAnalytic) {
    const ChannelDraw draw = draw_channel(cfg, rng, max_resamples);
    const double rho_da = distortion_factor(cfg.dac);
    const double rho_ad = distortion_factor(cfg.adc);
    for (double noise : noise_powers) {
      const auto terms =
          per_term_breakdown(draw.channel, draw.precoder, rho_da, rho_ad, noise);
      std::vector<double> g;
      g.reserve(terms.size());
      for (const auto& t : terms) g.push_back(t.siqnr());
      rec.rate.push_back(mean_rate(g));
      rec.siqnr.push_back(std::move(g));
    }
    return rec;
  }

  const PreparedTrial t =
      prepare_trial(cfg, mode, symbols_per_trial, rng, max_resamples);
  for (double noise : noise_powers) {
    auto g = empirical_siqnr(t.symbols, receive(t, cfg, mode, noise));
    rec.rate.push_back(mean_rate(g));
    rec.siqnr.push_back(std::move(g));
  }
  return rec;
}

SimEstimate estimate_rate(const SystemConfig& cfg, const SimOptions& options,
                          std::vector<TrialRecord>* records) {
  const double noise[] = {cfg.noise_power};
  auto trials = run_trials(cfg, noise, options);
  SimEstimate est = summarize(trials, 0, options.mode);
  if (records) *records = std::move(trials);
  return est;
}

std::vector<SimEstimate> estimate_rate_curve(const SystemConfig& cfg,
                                             std::span<const double> snrs,
                                             const SimOptions& options,
                                             std::vector<TrialRecord>* records) {
  std::vector<double> noise;
  noise.reserve(snrs.size());
  for (double snr : snrs) {
    if (!(snr > 0.0)) throw std::invalid_argument("SNR must be positive");
    noise.push_back(cfg.total_power / snr);
  }
  auto trials = run_trials(cfg, noise, options);
  std::vector<SimEstimate> out;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    out.push_back(summarize(trials, i, options.mode));
  }
  if (records) *records = std::move(trials);
  return out;
}

TermBreakdown asymptotic_terms(double rho_da, double rho_ad, double beta,
                               double total_power, double noise_power) {
  const double k = 1.0 / beta - 1.0;
  const double a2 = (1.0 - rho_ad) * (1.0 - rho_ad);
  TermBreakdown t;
  t.signal = a2 * (1.0 - rho_da) * total_power * k;
  t.interference = 0.0;
  t.dac_noise = a2 * rho_da * total_power;
  t.adc_noise = rho_ad * (1.0 - rho_ad) * (1.0 - rho_da) * total_power * k +
                rho_ad * rho_da * (1.0 - rho_ad) * total_power +
                rho_ad * (1.0 - rho_ad) * noise_power;
  t.thermal_noise = a2 * noise_power;
  return t;
}

std::vector<ConvergenceRow> convergence_study(const SystemConfig& base,
                                              std::span<const int> n_antennas,
                                              int realizations,
                                              std::uint64_t master_seed,
                                              int workers) {
  if (realizations < 1) {
    throw std::invalid_argument("convergence_study: need realizations >= 1");
  }
  const double beta = base.beta();
  const double rho_da = distortion_factor(base.dac);
  const double rho_ad = distortion_factor(base.adc);
  const TermBreakdown limit =
      asymptotic_terms(rho_da, rho_ad, beta, base.total_power, base.noise_power);
  const RngStream master(master_seed);

  std::vector<ConvergenceRow> rows;
  for (int n : n_antennas) {
    const double m_exact = beta * n;
    const int m = static_cast<int>(std::lround(m_exact));
    if (m < 1 || std::abs(m_exact - m) > 1e-9) {
      throw std::invalid_argument("convergence_study: beta*N must be an integer");
    }
    SystemConfig cfg = base;
    cfg.n_antennas = n;
    cfg.n_users = m;
    cfg.validate();
    const RngStream stream = master.substream(static_cast<std::uint64_t>(n));

    struct Sums {
      double s = 0, q1 = 0, q2 = 0, ratio = 0;
    };
    std::vector<std::exception_ptr> errors;
    auto sums = detail::parallel_map<Sums>(
        static_cast<std::size_t>(realizations), workers,
        [&](std::size_t r) {
          RngStream rng = stream.substream(r);
          const ChannelDraw draw = draw_channel(cfg, rng, 8);
          Sums acc;
          for (const auto& t : per_term_breakdown(draw.channel, draw.precoder,
                                                  rho_da, rho_ad,
                                                  cfg.noise_power)) {
            acc.s += t.signal;
            acc.q1 += t.dac_noise;
            acc.q2 += t.adc_noise;
            acc.ratio = std::max(acc.ratio, t.interference / t.signal);
          }
          return acc;
        },
        errors);
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    ConvergenceRow row;
    row.n_antennas = n;
    row.n_users = m;
    row.realizations = realizations;
    for (const auto& a : sums) {
      row.mean_signal += a.s;
      row.mean_dac_noise += a.q1;
      row.mean_adc_noise += a.q2;
      row.max_interference_ratio = std::max(row.max_interference_ratio, a.ratio);
    }
    const double count = static_cast<double>(realizations) * m;
    row.mean_signal /= count;
    row.mean_dac_noise /= count;
    row.mean_adc_noise /= count;
    row.limit_signal = limit.signal;
    row.limit_dac_noise = limit.dac_noise;
    row.limit_adc_noise = limit.adc_noise;

    auto gap = [](double mean, double lim) {
      return lim > 0.0 ? std::abs(mean - lim) / lim : 0.0;
    };
    row.deviation = std::max({gap(row.mean_signal, limit.signal),
                              gap(row.mean_dac_noise, limit.dac_noise),
                              gap(row.mean_adc_noise, limit.adc_noise)});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qmimo
