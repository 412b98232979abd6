#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmimo/rng.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

inline constexpr int kMaxDesignBits = 12;

/// Scalar quantizer for a unit-variance real Gaussian input.
///
/// Cell i is [thresholds[i-1], thresholds[i]) with the outer cells unbounded;
/// an input equal to a threshold falls into the upper cell. `rho` is the
/// normalized mean-squared error E{(Q(z)-z)²}/E{z²} for z ~ N(0, 1).
struct QuantizerCodebook {
  int bits = 0;
  std::vector<double> thresholds;  // 2^b - 1, strictly increasing
  std::vector<double> levels;      // 2^b, strictly increasing
  double rho = 0.0;

  double quantize(double z) const;

  /// Plain-text table: `bits`, `rho`, `thresholds`, `levels` lines.
  std::string to_text() const;
  static QuantizerCodebook from_text(std::string_view text);
};

/// Minimum-MSE (Lloyd-Max) quantizer for N(0, 1), 1 <= bits <= 12.
///
/// Starts from equal-probability cells and alternates closed-form Gaussian
/// centroids with midpoint thresholds; after a warm-up the same fixed point is
/// reached with Newton steps on the tridiagonal centroid/midpoint system.
/// Stops once no level moves more than 1e-10.
QuantizerCodebook design_lloyd_max(int bits);

/// Memoized design_lloyd_max; safe to call from several threads.
const QuantizerCodebook& lloyd_max_codebook(int bits);

/// Exact E{(Q(z)-z)²} for z ~ N(0, 1) under the given cells and levels.
double gaussian_distortion(std::span<const double> thresholds,
                           std::span<const double> levels);

/// Reference distortion factors for 1..8 bits.
inline constexpr double kDistortionTable[8] = {
    0.3634, 0.1175, 0.03454, 0.009497, 0.002499, 0.0006642, 0.0001660,
    0.00004151};

/// Table value for 1..8 bits, high-resolution approximation above, 0 if ideal.
double distortion_factor(Resolution resolution);

/// (π√3/2)·2^(-2b).
double distortion_factor_approx(int bits);

double quantize_real(double z, const QuantizerCodebook& codebook);

/// True DAC: real and imaginary parts are each scaled to unit RMS over the
/// vector, quantized, rescaled, and the result is multiplied by 1/√(1-ρ) so
/// the output power matches the input power.
CVector apply_dac(const CVector& x, const QuantizerCodebook& codebook);
CVector apply_dac(const CVector& x, Resolution resolution);

/// True ADC: same variance matching as apply_dac but no power restoration.
CVector apply_adc(const CVector& y, const QuantizerCodebook& codebook);
CVector apply_adc(const CVector& y, Resolution resolution);

/// Column-batched forms: every column is one converter's sample stream and
/// gets its own gain. Operate in place.
void apply_dac_columns(Eigen::Ref<CMatrix> x, const QuantizerCodebook& codebook);
void apply_adc_columns(Eigen::Ref<CMatrix> y, const QuantizerCodebook& codebook);

/// Linearized converter: out = gain·in + n, n ~ CN(0, noise_scale·power).
struct BussgangLinearModel {
  double gain = 1.0;
  double noise_scale = 0.0;

  /// gain √(1-ρ), noise ρ·diag(E{xxᴴ}).
  static BussgangLinearModel dac(double rho);
  /// gain 1-ρ, noise ρ(1-ρ)·diag(E{yyᴴ}).
  static BussgangLinearModel adc(double rho);
};

CVector bussgang_dac(const CVector& x, double rho, const RVector& per_entry_power,
                     RngStream& rng);
CVector bussgang_adc(const CVector& y, double rho, const RVector& per_entry_power,
                     RngStream& rng);

/// In-place batched model; column j has input power column_power[j].
void apply_bussgang_columns(Eigen::Ref<CMatrix> signal,
                            const BussgangLinearModel& model,
                            const RVector& column_power, RngStream& rng);

}  // namespace qmimo
