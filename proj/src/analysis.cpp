#include "qmimo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmimo/quantization.hpp"

namespace qmimo {
namespace {

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

// 1/β - 1: the post-ZF array gain per unit SNR.
double load_gain(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1)");
  }
  return 1.0 / beta - 1.0;
}

void check_budget(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("loss budget must be positive and finite");
  }
}

}  // namespace

int guarded_ceil(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

double rho_of(Resolution resolution, RhoModel model) {
  if (resolution.is_ideal()) return 0.0;
  return model == RhoModel::kTable
             ? distortion_factor(resolution)
             : distortion_factor_approx(resolution.bits());
}

double asymptotic_siqnr(double rho_da, double rho_ad, double beta, double snr) {
  const double k = load_gain(beta);
  const double num = (1.0 - rho_ad) * (1.0 - rho_da) * k * snr;
  const double den = rho_da * snr + rho_ad * (1.0 - rho_da) * k * snr + 1.0;
  return num / den;
}

double asymptotic_siqnr(const OperatingPoint& op) {
  return asymptotic_siqnr(rho_of(op.dac), rho_of(op.adc), op.beta, op.snr);
}

double asymptotic_siqnr(const SystemConfig& cfg) {
  return asymptotic_siqnr(cfg.operating_point());
}

double asymptotic_rate(const OperatingPoint& op) {
  return log2_1p(asymptotic_siqnr(op));
}

double asymptotic_rate(const SystemConfig& cfg) {
  return asymptotic_rate(cfg.operating_point());
}

double alpha_ad(double rho_ad, double beta, double snr) {
  return (1.0 - rho_ad) / (rho_ad * load_gain(beta) * snr + 1.0);
}

double alpha_da(double rho_da, double snr) {
  return (1.0 - rho_da) / (rho_da * snr + 1.0);
}

RateReport benchmark_rates(const OperatingPoint& op) {
  const double rho_da = rho_of(op.dac);
  const double rho_ad = rho_of(op.adc);
  RateReport r;
  r.nominal_snr = load_gain(op.beta) * op.snr;
  r.alpha_ad = alpha_ad(rho_ad, op.beta, op.snr);
  r.alpha_da = alpha_da(rho_da, op.snr);
  r.siqnr = asymptotic_siqnr(rho_da, rho_ad, op.beta, op.snr);
  r.rate = log2_1p(r.siqnr);
  r.rate_ideal_dac = log2_1p(r.alpha_ad * r.nominal_snr);
  r.rate_ideal_adc = log2_1p(r.alpha_da * r.nominal_snr);
  r.rate_ideal = log2_1p(r.nominal_snr);
  return r;
}

double rate_loss_dac(const OperatingPoint& op) {
  const double rho_da = rho_of(op.dac);
  const double rho_ad = rho_of(op.adc);
  const double k = load_gain(op.beta);
  const double ideal_dac =
      (1.0 - rho_ad) * k * op.snr / (rho_ad * k * op.snr + 1.0);
  return log2_1p(ideal_dac) -
         log2_1p(asymptotic_siqnr(rho_da, rho_ad, op.beta, op.snr));
}

double low_snr_loss_slope(const OperatingPoint& op) {
  return rho_of(op.dac) * (1.0 - rho_of(op.adc)) * load_gain(op.beta) /
         std::numbers::ln2;
}

double high_snr_loss_dac(double rho_da, double rho_ad, double beta) {
  if (!(rho_ad > 0.0)) {
    throw std::invalid_argument(
        "high_snr_loss_dac: needs a finite-resolution ADC (rho_ad > 0)");
  }
  if (rho_da == 0.0) return 0.0;
  const double k = load_gain(beta);
  return log2_1p((1.0 / rho_ad - 1.0) / ((1.0 / rho_da - 1.0) * k + 1.0));
}

double high_snr_loss_dac(Resolution dac, Resolution adc, double beta,
                         RhoModel model) {
  return high_snr_loss_dac(rho_of(dac, model), rho_of(adc, model), beta);
}

double rate_loss_adc(const OperatingPoint& op) {
  const double rho_da = rho_of(op.dac);
  const double rho_ad = rho_of(op.adc);
  return log2_1p(alpha_da(rho_da, op.snr) * load_gain(op.beta) * op.snr) -
         log2_1p(asymptotic_siqnr(rho_da, rho_ad, op.beta, op.snr));
}

double high_snr_loss_adc(double rho_da, double rho_ad, double beta) {
  if (!(rho_da > 0.0)) {
    throw std::invalid_argument(
        "high_snr_loss_adc: needs a finite-resolution DAC (rho_da > 0)");
  }
  const double k = load_gain(beta);
  const double ideal_adc = (1.0 - rho_da) * k / rho_da;
  const double quantized = (1.0 - rho_ad) * (1.0 - rho_da) * k /
                           (rho_da + rho_ad * (1.0 - rho_da) * k);
  return log2_1p(ideal_adc) - log2_1p(quantized);
}

DacPlan plan_dac_bits(const PlannerQuery& q) {
  check_budget(q.loss_budget);
  const double k = load_gain(q.beta);
  const Resolution adc = Resolution::bits(q.fixed_bits);
  const double rho_ad = distortion_factor(adc);
  const double two_r = std::exp2(q.loss_budget);

  const double x = (two_r - 1.0) * k;
  const double denom = x + 1.0 / rho_ad - two_r;
  if (!(denom > 0.0)) {
    throw InfeasibleBudget(
        "loss budget " + std::to_string(q.loss_budget) +
        " is outside the planner's range for beta=" + std::to_string(q.beta) +
        ", b_AD=" + std::to_string(q.fixed_bits) +
        ": (2^r-1)(1/beta-1) + 1/rho_AD - 2^r must be positive");
  }
  const double ratio = 2.0 / (std::sqrt(3.0) * std::numbers::pi) * x / denom;

  DacPlan plan;
  plan.continuous_bits = -0.5 * std::log2(ratio);
  plan.bits = std::max(1, guarded_ceil(plan.continuous_bits));
  const double common = q.fixed_bits - 0.5 * std::log2(two_r - 1.0);
  plan.bits_approx_a = std::max(1, guarded_ceil(common - 0.5 * std::log2(k)));
  plan.bits_approx_b =
      std::max(1, guarded_ceil(common + 0.5 * std::log2(q.beta)));

  plan.loss_high_resolution = high_snr_loss_dac(
      distortion_factor_approx(plan.bits), rho_ad, q.beta);
  plan.loss_table = high_snr_loss_dac(
      distortion_factor(Resolution::bits(plan.bits)), rho_ad, q.beta);
  return plan;
}

int plan_adc_bits(const PlannerQuery& q) {
  check_budget(q.loss_budget);
  load_gain(q.beta);
  if (q.fixed_bits < 1) {
    throw std::invalid_argument("plan_adc_bits: DAC resolution must be >= 1");
  }
  const double x = q.fixed_bits -
                   0.5 * std::log2(std::exp2(q.loss_budget) - 1.0) -
                   0.5 * std::log2(q.beta);
  return std::max(1, guarded_ceil(x));
}

Eigen::MatrixXd rate_grid(const OperatingPoint& base,
                          const std::vector<Resolution>& dac,
                          const std::vector<Resolution>& adc) {
  if (dac.empty() || adc.empty()) {
    throw std::invalid_argument("rate_grid: empty resolution range");
  }
  Eigen::MatrixXd grid(static_cast<Eigen::Index>(dac.size()),
                       static_cast<Eigen::Index>(adc.size()));
  OperatingPoint op = base;
  for (std::size_t i = 0; i < dac.size(); ++i) {
    for (std::size_t j = 0; j < adc.size(); ++j) {
      op.dac = dac[i];
      op.adc = adc[j];
      grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          asymptotic_rate(op);
    }
  }
  return grid;
}

}  // namespace qmimo
