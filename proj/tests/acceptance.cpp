// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "qmimo/analysis.hpp"
#include "qmimo/channel.hpp"
#include "qmimo/montecarlo.hpp"
#include "qmimo/precoding.hpp"
#include "qmimo/quantization.hpp"
#include "qmimo/rng.hpp"

using namespace qmimo;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Resolution res(int b) { return b <= 0 ? Resolution::ideal() : Resolution::bits(b); }

int worker_count() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Large-system SIQNR and degradation factors, written out independently of the
// library for cross-checking.
double ref_siqnr(double rd, double ra, double beta, double g) {
  const double k = 1.0 / beta - 1.0;
  return (1 - ra) * (1 - rd) * k * g / (rd * g + ra * (1 - rd) * k * g + 1.0);
}
double ref_rate(double rd, double ra, double beta, double g) {
  return std::log2(1.0 + ref_siqnr(rd, ra, beta, g));
}

const double kTable[8] = {0.3634, 0.1175, 0.03454, 0.009497,
                          0.002499, 0.0006642, 0.0001660, 0.00004151};

Outcome quantizer_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int worst_b = 0;
  std::ostringstream os;
  for (int b = 1; b <= 8; ++b) {
    const double rho = design_lloyd_max(b).rho;
    const double dev = std::abs(rho - kTable[b - 1]) / kTable[b - 1];
    os << " b" << b << "=" << fmt(rho) << "(" << fmt(100 * dev, 3) << "%)";
    if (dev > worst) {
      worst = dev;
      worst_b = b;
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 0.02 && dt < 5.0,
          "max rel dev " + fmt(100 * worst, 4) + "% at b=" + std::to_string(worst_b) +
              " (tol 2%), " + fmt(dt, 3) + " s;" + os.str()};
}

Outcome planner_golden() {
  const double budgets[] = {6, 4, 2, 0.5};
  const int expected[] = {2, 3, 4, 6};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 4; ++i) {
    const int b = plan_dac_bits({6, budgets[i], 0.125}).bits;
    ok = ok && b == expected[i];
    got += (i ? "," : "") + std::to_string(b);
  }
  return {ok, "b_DA = {" + got + "} for r1 = {6,4,2,0.5}, expected {2,3,4,6}"};
}

Outcome five_bit_share() {
  const double g = db_to_linear(-10.0);
  const double r55 = asymptotic_rate(OperatingPoint{0.125, g, res(5), res(5)});
  const double rinf = asymptotic_rate(OperatingPoint{0.125, g, res(0), res(0)});
  return {r55 >= 0.99 * rinf,
          "R(5,5)/R(inf,inf) = " + fmt(r55 / rinf, 8) + " (need >= 0.99)"};
}

struct Setting {
  int dac, adc;
  std::string label() const {
    return res(dac).to_string() + "/" + res(adc).to_string();
  }
};
const std::vector<Setting> kSweepSettings = {{0, 0}, {0, 6}, {3, 0}, {3, 6}, {5, 5}};

std::vector<double> sweep_snr_db() {
  std::vector<double> v;
  for (int db = -10; db <= 30; ++db) v.push_back(db);
  return v;
}

std::vector<std::vector<SimEstimate>> run_sweep(SimMode mode) {
  std::vector<double> snrs;
  for (double db : sweep_snr_db()) snrs.push_back(db_to_linear(db));
  SimOptions opts;
  opts.n_trials = 500;
  opts.symbols_per_trial = 2000;
  opts.mode = mode;
  opts.master_seed = 1;
  opts.workers = worker_count();
  std::vector<std::vector<SimEstimate>> out;
  for (const auto& s : kSweepSettings) {
    const auto cfg = SystemConfig::with_snr(128, 16, 1.0, res(s.dac), res(s.adc));
    out.push_back(estimate_rate_curve(cfg, snrs, opts));
  }
  return out;
}

Outcome sweep_agreement(const std::vector<std::vector<SimEstimate>>& sim, double dt) {
  const auto db = sweep_snr_db();
  double worst = 0.0;
  std::string where;
  for (std::size_t s = 0; s < kSweepSettings.size(); ++s) {
    const double rd = distortion_factor(res(kSweepSettings[s].dac));
    const double ra = distortion_factor(res(kSweepSettings[s].adc));
    for (std::size_t i = 0; i < db.size(); ++i) {
      const double cf = ref_rate(rd, ra, 0.125, db_to_linear(db[i]));
      const double dev = std::abs(sim[s][i].mean_rate - cf) / cf;
      if (dev > worst) {
        worst = dev;
        where = kSweepSettings[s].label() + " @ " + fmt(db[i]) + " dB (sim " +
                fmt(sim[s][i].mean_rate) + ", closed form " + fmt(cf) + ")";
      }
    }
  }
  return {worst < 0.05, "max rel dev " + fmt(100 * worst, 4) + "% (tol 5%) at " +
                            where + "; 5 settings x 41 SNRs, 500x2000, " +
                            fmt(dt, 4) + " s"};
}

Outcome power_terms() {
  const auto t0 = Clock::now();
  const Setting settings[] = {{3, 3}, {4, 6}, {6, 3}, {2, 5}};
  const int n[] = {128};
  double worst = 0.0, worst_i = 0.0;
  double gap[3] = {0.0, 0.0, 0.0};
  const auto rel = [](double x, double ref) { return std::abs(x / ref - 1.0); };
  for (const auto& s : settings) {
    const auto cfg = SystemConfig::with_snr(128, 16, 1.0, res(s.dac), res(s.adc));
    const auto row = convergence_study(cfg, n, 500, 13, worker_count()).front();
    worst = std::max(worst, row.deviation);
    worst_i = std::max(worst_i, row.max_interference_ratio);
    gap[0] = std::max(gap[0], rel(row.mean_signal, row.limit_signal));
    gap[1] = std::max(gap[1], rel(row.mean_dac_noise, row.limit_dac_noise));
    gap[2] = std::max(gap[2], rel(row.mean_adc_noise, row.limit_adc_noise));
  }
  const double dt = seconds_since(t0);
  return {worst < 0.03 && worst_i < 1e-12 && dt < 120.0,
          "max rel gap of mean S,Q1,Q2 " + fmt(100 * worst, 4) + "% (tol 3%; S " +
              fmt(100 * gap[0], 3) + "%, Q1 " + fmt(100 * gap[1], 3) + "%, Q2 " +
              fmt(100 * gap[2], 3) + "%); max I/S " + fmt(worst_i, 3) +
              " (tol 1e-12); 4 settings x 500 draws, " + fmt(dt, 3) + " s"};
}

Outcome random_matrix_limits() {
  SystemConfig cfg;
  const RngStream master(2718);
  double sum = 0.0, worst_diag = 0.0, worst_off = 0.0;
  const double c_limit = std::sqrt(7.0);
  for (int i = 0; i < 200; ++i) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(i));
    const auto ch = generate_channel(cfg, rng);
    sum += wishart_trace(ch);
    const CMatrix hp = ch.h * zf_precoder(ch, 1.0).p;
    for (Eigen::Index k = 0; k < hp.rows(); ++k) {
      worst_diag = std::max(worst_diag, std::abs(hp(k, k).real() / c_limit - 1.0));
      worst_diag = std::max(worst_diag, std::abs(hp(k, k).imag()) / c_limit);
      for (Eigen::Index j = 0; j < hp.cols(); ++j) {
        if (j != k) worst_off = std::max(worst_off, std::abs(hp(k, j)));
      }
    }
  }
  const double mean = sum / 200.0;
  const double dev = std::abs(mean / (1.0 / 7.0) - 1.0);
  return {dev < 0.02 && worst_diag < 0.05 && worst_off < 1e-8,
          "mean tr{(HH^H)^-1} " + fmt(mean) + " vs 1/7 rel dev " + fmt(100 * dev, 3) +
              "% (tol 2%); max |HP_kk/sqrt7 - 1| " + fmt(100 * worst_diag, 3) +
              "% (tol 5%); max |off-diag| " + fmt(worst_off, 3)};
}

Outcome low_snr_slope() {
  double worst = 0.0;
  const double g = 1e-3;
  for (int d = 3; d <= 6; ++d) {
    for (int a = 3; a <= 6; ++a) {
      const double rd = kTable[d - 1], ra = kTable[a - 1];
      const double limit = rd * (1 - ra) * 7.0 / std::log(2.0);
      const double loss = ref_rate(0, ra, 0.125, g) - ref_rate(rd, ra, 0.125, g);
      const double lib = rate_loss_dac(OperatingPoint{0.125, g, res(d), res(a)});
      const double slope = low_snr_loss_slope(OperatingPoint{0.125, g, res(d), res(a)});
      worst = std::max({worst, std::abs(lib / g / limit - 1.0),
                        std::abs(loss / g / limit - 1.0),
                        std::abs(slope / limit - 1.0)});
    }
  }
  return {worst < 0.02, "max rel gap " + fmt(100 * worst, 4) +
                            "% (tol 2%) over 16 (b_DA, b_AD) pairs at gamma0=1e-3"};
}

Outcome equal_bit_ordering() {
  int violations = 0, checked = 0;
  for (int b = 1; b <= 8; ++b) {
    for (double g : {1e-2, 1.0, 1e2}) {
      for (double beta : {1.0 / 16, 1.0 / 8, 1.0 / 4}) {
        const auto rep = benchmark_rates(OperatingPoint{beta, g, res(b), res(b)});
        const double r = kTable[b - 1];
        const double a_da = (1 - r) / (r * g + 1);
        const double a_ad = (1 - r) / (r * (1 / beta - 1) * g + 1);
        ++checked;
        if (!(rep.alpha_da > rep.alpha_ad) || !(a_da > a_ad)) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations of alpha_DA > alpha_AD in " +
                               std::to_string(checked) + " grid points"};
}

Outcome load_vs_dac_bits() {
  const int b1 = plan_dac_bits({6, 1.0, 1.0 / 64}).bits_approx_b;
  const int b2 = plan_dac_bits({6, 1.0, 1.0 / 16}).bits_approx_b;
  const int b3 = plan_dac_bits({6, 1.0, 1.0 / 4}).bits_approx_b;
  return {b2 == b1 + 1 && b3 == b2 + 1,
          "approximation (b) b_DA = " + std::to_string(b1) + ", " +
              std::to_string(b2) + ", " + std::to_string(b3) +
              " for beta = 1/64, 1/16, 1/4"};
}

Outcome reductions() {
  std::mt19937_64 gen(1000);
  std::uniform_real_distribution<double> rho(0.0, 0.5), beta(0.01, 0.99), db(-30, 30);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double rd = rho(gen), ra = rho(gen), b = beta(gen), g = db_to_linear(db(gen));
    const double nominal = (1 / b - 1) * g;
    const double a_ad = (1 - ra) / (ra * (1 / b - 1) * g + 1);
    const double a_da = (1 - rd) / (rd * g + 1);
    const double r18 = std::log2(1 + a_ad * nominal);
    const double r19 = std::log2(1 + a_da * nominal);
    const double r20 = std::log2(1 + nominal);
    auto lib = [&](double d, double a) {
      return std::log2(1 + asymptotic_siqnr(d, a, b, g));
    };
    worst = std::max({worst, std::abs(lib(0, ra) - r18), std::abs(lib(rd, 0) - r19),
                      std::abs(lib(0, 0) - r20)});
  }
  return {worst <= 1e-12, "max |diff| " + fmt(worst, 3) + " over 1000 points (tol 1e-12)"};
}

Outcome bussgang_validity(const std::vector<std::vector<SimEstimate>>& tru, double dt) {
  RngStream rng(31415);
  CVector y(500000);
  rng.fill_complex_gaussian(y, 1.0);
  double worst_r = 0.0;
  for (int b = 3; b <= 8; ++b) {
    const auto& cb = lloyd_max_codebook(b);
    const CVector e = apply_adc(y, cb) - (1.0 - cb.rho) * y;
    worst_r = std::max(worst_r, std::abs(y.dot(e).real()) /
                                    std::sqrt(y.squaredNorm() * e.squaredNorm()));
  }
  const auto t0 = Clock::now();
  const auto lin = run_sweep(SimMode::kBussgangLinear);
  const double dt_lin = seconds_since(t0);
  const auto db = sweep_snr_db();
  double worst = 0.0;
  std::string where;
  for (std::size_t s = 0; s < kSweepSettings.size(); ++s) {
    if (kSweepSettings[s].dac == 0 && kSweepSettings[s].adc == 0) continue;
    for (std::size_t i = 0; i < db.size(); ++i) {
      const double dev = std::abs(tru[s][i].mean_rate / lin[s][i].mean_rate - 1.0);
      if (dev > worst) {
        worst = dev;
        where = kSweepSettings[s].label() + " @ " + fmt(db[i]) + " dB";
      }
    }
  }
  return {worst_r < 0.01 && worst < 0.05,
          "max |r| " + fmt(worst_r, 3) + " for b=3..8 at 1e6 samples (tol 0.01); " +
              "true vs linear max rel dev " + fmt(100 * worst, 4) + "% at " + where +
              " (tol 5%); sim " + fmt(dt + dt_lin, 4) + " s"};
}

Outcome determinism() {
  auto sweep = [](const char* workers) {
    std::ostringstream out, err;
    const int code = cli::run(
        {"qmimo", "rate-sweep", "--simulate", "true", "--n-trials", "40",
         "--symbols-per-trial", "500", "--snr-db", "-10:30:9", "--master-seed",
         "20240", "--workers", workers},
        out, err);
    return code == 0 ? out.str() : "exit " + std::to_string(code) + err.str();
  };
  const auto a = sweep("1"), b = sweep("1"), c = sweep("8");
  const bool ok = a == b && a == c && a.rfind("# qmimo rate-sweep", 0) == 0;
  return {ok, std::string("repeat run ") + (a == b ? "identical" : "DIFFERS") +
                  ", workers 1 vs 8 " + (a == c ? "identical" : "DIFFERS") + " (" +
                  std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " C" << id << " " << name << ": "
              << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  };

  report(1, "quantizer oracle", quantizer_oracle());
  report(2, "planner golden values", planner_golden());
  report(3, "99% claim", five_bit_share());

  const auto t0 = Clock::now();
  const auto tru = run_sweep(SimMode::kTrueQuantizer);
  const double dt = seconds_since(t0);
  report(4, "rate curve agreement", sweep_agreement(tru, dt));

  report(5, "power-term convergence", power_terms());
  report(6, "random-matrix limits", random_matrix_limits());
  report(7, "low-SNR slope", low_snr_slope());
  report(8, "equal-bit degradation ordering", equal_bit_ordering());
  report(9, "load vs DAC bits", load_vs_dac_bits());
  report(10, "reduction identities", reductions());
  report(11, "Bussgang validity", bussgang_validity(tru, dt));
  report(12, "determinism", determinism());

  std::cout << (12 - failed) << "/12 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
