#pragma once

#include <vector>

#include "qmimo/types.hpp"

namespace qmimo {

/// Which model supplies ρ(b) for a finite resolution.
enum class RhoModel {
  kTable,           // tabulated optimum for b <= 8, high-resolution formula above
  kHighResolution,  // (π√3/2)·2^(-2b) for every b
};

double rho_of(Resolution resolution, RhoModel model = RhoModel::kTable);

/// Large-system SIQNR in terms of the two distortion factors. Rates are in
/// bits/s/Hz throughout.
double asymptotic_siqnr(double rho_da, double rho_ad, double beta, double snr);
double asymptotic_siqnr(const OperatingPoint& op);
double asymptotic_siqnr(const SystemConfig& cfg);

double asymptotic_rate(const OperatingPoint& op);
double asymptotic_rate(const SystemConfig& cfg);

/// SNR degradation caused by finite-bit ADCs alone.
double alpha_ad(double rho_ad, double beta, double snr);
/// SNR degradation caused by finite-bit DACs alone.
double alpha_da(double rho_da, double snr);

struct RateReport {
  double siqnr = 0.0;
  double rate = 0.0;
  double rate_ideal_dac = 0.0;  // R(∞, b_AD)
  double rate_ideal_adc = 0.0;  // R(b_DA, ∞)
  double rate_ideal = 0.0;      // R(∞, ∞)
  double alpha_ad = 1.0;
  double alpha_da = 1.0;
  double nominal_snr = 0.0;     // (1/β - 1)·γ0
};

RateReport benchmark_rates(const OperatingPoint& op);

/// R(∞, b_AD) - R(b_DA, b_AD).
double rate_loss_dac(const OperatingPoint& op);

/// Limit of rate_loss_dac / γ0 as γ0 → 0.
double low_snr_loss_slope(const OperatingPoint& op);

/// Limit of rate_loss_dac as γ0 → ∞. Needs a finite ADC; an ideal DAC
/// gives 0.
double high_snr_loss_dac(double rho_da, double rho_ad, double beta);
double high_snr_loss_dac(Resolution dac, Resolution adc, double beta,
                         RhoModel model = RhoModel::kTable);

/// R(b_DA, ∞) - R(b_DA, b_AD).
double rate_loss_adc(const OperatingPoint& op);

/// Limit of rate_loss_adc as γ0 → ∞. Needs a finite DAC.
double high_snr_loss_adc(double rho_da, double rho_ad, double beta);

struct PlannerQuery {
  int fixed_bits = 6;       // resolution of the converter that is given
  double loss_budget = 1.0; // r1 (DAC planning) or r2 (ADC planning)
  double beta = 0.125;
};

struct DacPlan {
  int bits = 0;          // exact high-SNR solve, ADC distortion from the table
  int bits_approx_a = 0; // ρ_AD from the high-resolution formula, ρ_AD ≪ 1
  int bits_approx_b = 0; // additionally β ≪ 1
  double continuous_bits = 0.0;
  /// High-SNR loss at `bits`, DAC distortion modeled by the high-resolution
  /// formula (the model the solve is exact under) and by the table.
  double loss_high_resolution = 0.0;
  double loss_table = 0.0;
};

/// Smallest DAC resolution whose high-SNR loss stays within the budget.
/// Throws InfeasibleBudget when no finite resolution suffices.
DacPlan plan_dac_bits(const PlannerQuery& query);

/// ADC resolution for a fixed DAC and loss budget, floored at 1 bit.
int plan_adc_bits(const PlannerQuery& query);

/// Rate on a (b_DA × b_AD) grid; rows follow `dac`, columns follow `adc`.
Eigen::MatrixXd rate_grid(const OperatingPoint& base,
                          const std::vector<Resolution>& dac,
                          const std::vector<Resolution>& adc);

/// ⌈x - 1e-9⌉: values within round-off of an integer are not bumped.
int guarded_ceil(double x);

}  // namespace qmimo
