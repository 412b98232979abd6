#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qmimo/analysis.hpp"
#include "qmimo/channel.hpp"
#include "qmimo/precoding.hpp"
#include "qmimo/quantization.hpp"
#include "qmimo/rng.hpp"
#include "run_config.hpp"

namespace qmimo::cli {
namespace {

SuiteResult quantizer_table() {
  SuiteResult r{"quantizer-table", true, {}};
  std::ostringstream os;
  double worst = 0.0;
  int worst_bits = 0;
  for (int b = 1; b <= 8; ++b) {
    const double designed = lloyd_max_codebook(b).rho;
    const double table = kDistortionTable[b - 1];
    const double dev = std::abs(designed - table) / table;
    if (dev > worst) {
      worst = dev;
      worst_bits = b;
    }
    os << " b" << b << "=" << format_number(designed) << "("
       << format_number(100.0 * dev) << "%)";
  }
  r.passed = worst < 0.02;
  r.detail = "max_rel_dev=" + format_number(worst) + " at b=" +
             std::to_string(worst_bits) + ";" + os.str();
  return r;
}

SuiteResult wishart(std::uint64_t seed) {
  SuiteResult r{"wishart-trace", true, {}};
  SystemConfig cfg;
  cfg.n_antennas = 128;
  cfg.n_users = 16;
  const RngStream master(seed);
  const int draws = 200;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(i));
    sum += wishart_trace(generate_channel(cfg, rng));
  }
  const double mean = sum / draws;
  const double limit = 16.0 / 112.0;
  const double dev = std::abs(mean - limit) / limit;
  r.passed = dev < 0.02;
  r.detail = "mean=" + format_number(mean) + " limit=" + format_number(limit) +
             " rel_dev=" + format_number(dev);
  return r;
}

SuiteResult bussgang_orthogonality(std::uint64_t seed) {
  SuiteResult r{"bussgang-orthogonality", true, {}};
  RngStream rng = RngStream(seed).substream(0xb055);
  CVector y(500000);  // 10^6 real samples
  rng.fill_complex_gaussian(y, 1.0);
  std::ostringstream os;
  double worst = 0.0;
  for (int b = 3; b <= 8; ++b) {
    const auto& cb = lloyd_max_codebook(b);
    const CVector e = apply_adc(y, cb) - (1.0 - cb.rho) * y;
    const double corr =
        std::abs(y.dot(e).real()) / std::sqrt(e.squaredNorm() * y.squaredNorm());
    worst = std::max(worst, corr);
    os << " b" << b << "=" << format_number(corr);
  }
  r.passed = worst < 0.01;
  r.detail = "max_abs_r=" + format_number(worst) + ";" + os.str();
  return r;
}

SuiteResult reduction_identities(std::uint64_t seed) {
  SuiteResult r{"reduction-identities", true, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> rho(0.0, 0.5);
  std::uniform_real_distribution<double> beta(0.01, 0.99);
  std::uniform_real_distribution<double> snr_db(-30.0, 30.0);
  double worst = 0.0;
  auto rate = [](double g) { return std::log2(1.0 + g); };
  for (int i = 0; i < 1000; ++i) {
    const double rd = rho(gen), ra = rho(gen), b = beta(gen);
    const double g0 = db_to_linear(snr_db(gen));
    const double nominal = (1.0 / b - 1.0) * g0;
    worst = std::max({worst,
                      std::abs(rate(asymptotic_siqnr(0.0, ra, b, g0)) -
                               rate(alpha_ad(ra, b, g0) * nominal)),
                      std::abs(rate(asymptotic_siqnr(rd, 0.0, b, g0)) -
                               rate(alpha_da(rd, g0) * nominal)),
                      std::abs(rate(asymptotic_siqnr(0.0, 0.0, b, g0)) -
                               rate(nominal))});
  }
  r.passed = worst <= 1e-12;
  r.detail = "max_abs_diff=" + format_number(worst) + " over 1000 points";
  return r;
}

}  // namespace

std::vector<SuiteResult> run_validation(std::uint64_t master_seed) {
  return {quantizer_table(), wishart(master_seed),
          bussgang_orthogonality(master_seed), reduction_identities(master_seed)};
}

}  // namespace qmimo::cli
