#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qmimo {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// HHᴴ was numerically singular; the draw should be resampled.
class SingularChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantizer input whose power estimate underflows.
class ZeroPowerInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No finite DAC resolution meets the requested loss budget.
class InfeasibleBudget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Converter resolution in bits, or ideal (infinite resolution).
class Resolution {
 public:
  constexpr Resolution() = default;

  static constexpr Resolution ideal() { return Resolution{}; }
  static Resolution bits(int b);
  /// Accepts a positive integer or "inf".
  static Resolution parse(std::string_view text);

  constexpr bool is_ideal() const { return bits_ == 0; }
  int bits() const;
  std::string to_string() const;

  friend constexpr bool operator==(Resolution, Resolution) = default;

 private:
  constexpr explicit Resolution(int b) : bits_(b) {}
  int bits_ = 0;
};

/// Closed-form operating point: everything the asymptotic formulas depend on.
struct OperatingPoint {
  double beta = 0.125;
  double snr = 1.0;  // linear γ0
  Resolution dac = Resolution::ideal();
  Resolution adc = Resolution::ideal();
};

/// Finite-dimensional downlink configuration. SNR is linear, P/σn².
struct SystemConfig {
  int n_antennas = 128;
  int n_users = 16;
  double total_power = 1.0;
  double noise_power = 1.0;
  Resolution dac = Resolution::ideal();
  Resolution adc = Resolution::ideal();

  double beta() const { return static_cast<double>(n_users) / n_antennas; }
  double snr() const { return total_power / noise_power; }
  OperatingPoint operating_point() const { return {beta(), snr(), dac, adc}; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  static SystemConfig with_snr(int n_antennas, int n_users, double snr,
                               Resolution dac, Resolution adc,
                               double total_power = 1.0);
};

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace qmimo
