#include "qmimo/quantization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

namespace qmimo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLevelTolerance = 1e-10;
constexpr int kMaxIterations = 10000;
constexpr int kLloydWarmup = 200;

double pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Upper-tail probability Q(x) = P(Z > x).
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// P(a <= Z < b), evaluated on whichever tail keeps full relative precision.
double cell_probability(double a, double b) {
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
  return 1.0 - upper_tail(b) - upper_tail(-a);
}

// x·φ(x), with the limit 0 at ±∞.
double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * pdf(x); }

double lower_edge(std::span<const double> t, std::size_t cell) {
  return cell == 0 ? -kInf : t[cell - 1];
}

double upper_edge(std::span<const double> t, std::size_t cell) {
  return cell == t.size() ? kInf : t[cell];
}

std::vector<double> centroids(std::span<const double> t) {
  std::vector<double> levels(t.size() + 1);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double a = lower_edge(t, i);
    const double b = upper_edge(t, i);
    levels[i] = (pdf(a) - pdf(b)) / cell_probability(a, b);
  }
  return levels;
}

std::vector<double> midpoints(std::span<const double> levels) {
  std::vector<double> t(levels.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = 0.5 * (levels[i] + levels[i + 1]);
  }
  return t;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

bool strictly_increasing(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) ==
         v.end();
}

// One Newton step on F_i(t) = t_i - (c_i + c_{i+1})/2. The Jacobian is
// tridiagonal because centroid c_i only depends on its two cell edges.
std::vector<double> newton_step(std::span<const double> t,
                                std::span<const double> levels) {
  const std::size_t n = t.size();
  std::vector<double> d_lower(n + 1), d_upper(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double a = lower_edge(t, i);
    const double b = upper_edge(t, i);
    const double p = cell_probability(a, b);
    d_lower[i] = std::isinf(a) ? 0.0 : pdf(a) * (levels[i] - a) / p;
    d_upper[i] = std::isinf(b) ? 0.0 : pdf(b) * (b - levels[i]) / p;
  }
  std::vector<double> diag(n), sub(n), sup(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 1.0 - 0.5 * (d_upper[i] + d_lower[i + 1]);
    sub[i] = -0.5 * d_lower[i];
    sup[i] = -0.5 * d_upper[i + 1];
    rhs[i] = t[i] - 0.5 * (levels[i] + levels[i + 1]);
  }
  // Thomas algorithm.
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> dx(n);
  dx[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    dx[i] = (rhs[i] - sup[i] * dx[i + 1]) / diag[i];
  }
  return dx;
}

void symmetrize(std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (v[n - 1 - i] - v[i]);
    v[i] = -m;
    v[n - 1 - i] = m;
  }
  if (n % 2 == 1) v[n / 2] = 0.0;
}

void check_rho(double rho, const char* who) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": distortion factor must lie in [0, 1)");
  }
}

// Variance-matched quantization of one real dimension of a complex stream.
template <typename Vec, typename Part, typename Assign>
void quantize_dimension(Vec& v, const QuantizerCodebook& cb, Part part,
                        Assign assign, double rms, double out_scale) {
  if (rms == 0.0) {
    for (Eigen::Index i = 0; i < v.size(); ++i) assign(v(i), 0.0);
    return;
  }
  const double inv = 1.0 / rms;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    assign(v(i), out_scale * rms * cb.quantize(part(v(i)) * inv));
  }
}

template <typename Vec>
void quantize_stream(Vec&& v, const QuantizerCodebook& cb, double out_scale) {
  const double n = static_cast<double>(v.size());
  const double re_rms = std::sqrt(v.real().squaredNorm() / n);
  const double im_rms = std::sqrt(v.imag().squaredNorm() / n);
  if (!(re_rms * re_rms + im_rms * im_rms >
        std::numeric_limits<double>::min())) {
    throw ZeroPowerInput("quantizer input has zero power");
  }
  quantize_dimension(
      v, cb, [](const cdouble& c) { return c.real(); },
      [](cdouble& c, double q) { c.real(q); }, re_rms, out_scale);
  quantize_dimension(
      v, cb, [](const cdouble& c) { return c.imag(); },
      [](cdouble& c, double q) { c.imag(q); }, im_rms, out_scale);
}

double dac_power_scale(const QuantizerCodebook& cb) {
  return 1.0 / std::sqrt(1.0 - cb.rho);
}

}  // namespace

double QuantizerCodebook::quantize(double z) const {
  // Branchless upper_bound; levels.size() is a power of two.
  std::size_t idx = 0;
  for (std::size_t step = levels.size() / 2; step > 0; step /= 2) {
    idx += (z >= thresholds[idx + step - 1]) ? step : 0;
  }
  return levels[idx];
}

std::string QuantizerCodebook::to_text() const {
  std::ostringstream os;
  char buf[32];
  os << "# Lloyd-Max codebook, unit-variance Gaussian input\n";
  os << "bits " << bits << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", rho);
  os << "rho " << buf << '\n';
  os << "thresholds";
  for (double t : thresholds) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << ' ' << buf;
  }
  os << "\nlevels";
  for (double l : levels) {
    std::snprintf(buf, sizeof buf, "%.17g", l);
    os << ' ' << buf;
  }
  os << '\n';
  return os.str();
}

QuantizerCodebook QuantizerCodebook::from_text(std::string_view text) {
  QuantizerCodebook cb;
  bool have_bits = false, have_rho = false, have_t = false, have_l = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    std::string key;
    row >> key;
    if (key == "bits") {
      have_bits = static_cast<bool>(row >> cb.bits);
    } else if (key == "rho") {
      have_rho = static_cast<bool>(row >> cb.rho);
    } else if (key == "thresholds" || key == "levels") {
      auto& dst = key == "levels" ? cb.levels : cb.thresholds;
      double v;
      while (row >> v) dst.push_back(v);
      (key == "levels" ? have_l : have_t) = true;
    } else {
      throw std::invalid_argument("codebook table: unknown key '" + key + "'");
    }
  }
  if (!have_bits || !have_rho || !have_t || !have_l) {
    throw std::invalid_argument("codebook table: missing bits/rho/thresholds/levels");
  }
  if (cb.bits < 1 || cb.bits > 24) {
    throw std::invalid_argument("codebook table: bits out of range");
  }
  const std::size_t n_levels = std::size_t{1} << cb.bits;
  if (cb.levels.size() != n_levels || cb.thresholds.size() != n_levels - 1) {
    throw std::invalid_argument("codebook table: wrong number of entries");
  }
  if (!strictly_increasing(cb.levels) || !strictly_increasing(cb.thresholds)) {
    throw std::invalid_argument("codebook table: entries must be increasing");
  }
  return cb;
}

double gaussian_distortion(std::span<const double> thresholds,
                           std::span<const double> levels) {
  double d = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double a = lower_edge(thresholds, i);
    const double b = upper_edge(thresholds, i);
    const double p = cell_probability(a, b);
    const double m1 = pdf(a) - pdf(b);               // ∫ z φ
    const double m2 = p + x_pdf(a) - x_pdf(b);       // ∫ z² φ
    const double y = levels[i];
    d += m2 - 2.0 * y * m1 + y * y * p;
  }
  return d;
}

QuantizerCodebook design_lloyd_max(int bits) {
  if (bits < 1 || bits > kMaxDesignBits) {
    throw std::invalid_argument("design_lloyd_max: bits must be in 1..12");
  }
  const std::size_t n_levels = std::size_t{1} << bits;
  const boost::math::normal_distribution<double> gauss;

  std::vector<double> t(n_levels - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = boost::math::quantile(gauss, double(i + 1) / double(n_levels));
  }
  std::vector<double> levels = centroids(t);

  bool converged = false;
  for (int it = 0; it < kLloydWarmup && !converged; ++it) {
    t = midpoints(levels);
    auto next = centroids(t);
    converged = max_abs_difference(next, levels) < kLevelTolerance;
    levels = std::move(next);
  }
  for (int it = kLloydWarmup; it < kMaxIterations && !converged; ++it) {
    const auto dx = newton_step(t, levels);
    std::vector<double> trial(t.size());
    for (double step = 1.0; step > 1e-6; step *= 0.5) {
      for (std::size_t i = 0; i < t.size(); ++i) trial[i] = t[i] - step * dx[i];
      if (strictly_increasing(trial)) break;
    }
    t = std::move(trial);
    auto next = centroids(t);
    converged = max_abs_difference(next, levels) < kLevelTolerance;
    levels = std::move(next);
  }

  symmetrize(t);
  levels = centroids(t);
  symmetrize(levels);

  QuantizerCodebook cb;
  cb.bits = bits;
  cb.thresholds = std::move(t);
  cb.levels = std::move(levels);
  cb.rho = gaussian_distortion(cb.thresholds, cb.levels);
  return cb;
}

const QuantizerCodebook& lloyd_max_codebook(int bits) {
  static std::array<std::unique_ptr<QuantizerCodebook>, kMaxDesignBits + 1>
      cache;
  static std::mutex mutex;
  if (bits < 1 || bits > kMaxDesignBits) {
    throw std::invalid_argument("lloyd_max_codebook: bits must be in 1..12");
  }
  std::lock_guard lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(bits)];
  if (!slot) slot = std::make_unique<QuantizerCodebook>(design_lloyd_max(bits));
  return *slot;
}

double distortion_factor(Resolution resolution) {
  if (resolution.is_ideal()) return 0.0;
  const int b = resolution.bits();
  if (b <= 8) return kDistortionTable[b - 1];
  return distortion_factor_approx(b);
}

double distortion_factor_approx(int bits) {
  if (bits < 1) {
    throw std::invalid_argument("distortion_factor_approx: bits must be >= 1");
  }
  return std::numbers::pi * std::sqrt(3.0) / 2.0 * std::exp2(-2.0 * bits);
}

double quantize_real(double z, const QuantizerCodebook& codebook) {
  return codebook.quantize(z);
}

CVector apply_dac(const CVector& x, const QuantizerCodebook& codebook) {
  CVector out = x;
  quantize_stream(out, codebook, dac_power_scale(codebook));
  return out;
}

CVector apply_dac(const CVector& x, Resolution resolution) {
  if (resolution.is_ideal()) return x;
  return apply_dac(x, lloyd_max_codebook(resolution.bits()));
}

CVector apply_adc(const CVector& y, const QuantizerCodebook& codebook) {
  CVector out = y;
  quantize_stream(out, codebook, 1.0);
  return out;
}

CVector apply_adc(const CVector& y, Resolution resolution) {
  if (resolution.is_ideal()) return y;
  return apply_adc(y, lloyd_max_codebook(resolution.bits()));
}

void apply_dac_columns(Eigen::Ref<CMatrix> x, const QuantizerCodebook& codebook) {
  const double scale = dac_power_scale(codebook);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    quantize_stream(x.col(j), codebook, scale);
  }
}

void apply_adc_columns(Eigen::Ref<CMatrix> y, const QuantizerCodebook& codebook) {
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    quantize_stream(y.col(j), codebook, 1.0);
  }
}

BussgangLinearModel BussgangLinearModel::dac(double rho) {
  check_rho(rho, "BussgangLinearModel::dac");
  return {std::sqrt(1.0 - rho), rho};
}

BussgangLinearModel BussgangLinearModel::adc(double rho) {
  check_rho(rho, "BussgangLinearModel::adc");
  return {1.0 - rho, rho * (1.0 - rho)};
}

void apply_bussgang_columns(Eigen::Ref<CMatrix> signal,
                            const BussgangLinearModel& model,
                            const RVector& column_power, RngStream& rng) {
  if (column_power.size() != signal.cols()) {
    throw std::invalid_argument("apply_bussgang_columns: power/column mismatch");
  }
  if (model.noise_scale == 0.0) {
    signal *= model.gain;
    return;
  }
  for (Eigen::Index j = 0; j < signal.cols(); ++j) {
    const double sd = std::sqrt(model.noise_scale * column_power[j] / 2.0);
    for (Eigen::Index i = 0; i < signal.rows(); ++i) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      signal(i, j) = model.gain * signal(i, j) + cdouble(sd * re, sd * im);
    }
  }
}

CVector bussgang_dac(const CVector& x, double rho,
                     const RVector& per_entry_power, RngStream& rng) {
  CMatrix row = x.transpose();
  apply_bussgang_columns(row, BussgangLinearModel::dac(rho), per_entry_power,
                         rng);
  return row.transpose();
}

CVector bussgang_adc(const CVector& y, double rho,
                     const RVector& per_entry_power, RngStream& rng) {
  CMatrix row = y.transpose();
  apply_bussgang_columns(row, BussgangLinearModel::adc(rho), per_entry_power,
                         rng);
  return row.transpose();
}

}  // namespace qmimo
