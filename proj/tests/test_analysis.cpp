#include <doctest.h>

#include <cmath>
#include <random>

#include "qmimo/analysis.hpp"
#include "qmimo/quantization.hpp"

using namespace qmimo;

namespace {

// SIQNR assembled from the large-system power terms; shares no code with
// asymptotic_siqnr.
double siqnr_from_terms(double rd, double ra, double beta, double snr) {
  const double p = 1.0, noise = p / snr, k = 1.0 / beta - 1.0;
  const double a2 = (1.0 - ra) * (1.0 - ra);
  const double s = a2 * (1.0 - rd) * p * k;
  const double q1 = a2 * rd * p;
  const double q2 = ra * (1.0 - ra) * ((1.0 - rd) * p * k + rd * p + noise);
  return s / (q1 + q2 + a2 * noise);
}

OperatingPoint op(double beta, double snr, int dac, int adc) {
  auto res = [](int b) { return b <= 0 ? Resolution::ideal() : Resolution::bits(b); };
  return {beta, snr, res(dac), res(adc)};
}

double rho(int b) { return distortion_factor(Resolution::bits(b)); }

}  // namespace

TEST_CASE("ideal converters give the nominal SNR") {
  CHECK(asymptotic_siqnr(op(0.125, 1.0, 0, 0)) == doctest::Approx(7.0));
  CHECK(asymptotic_rate(op(0.125, 1.0, 0, 0)) == doctest::Approx(3.0));
  CHECK(asymptotic_siqnr(op(0.125, 0.0, 3, 3)) == 0.0);
}

TEST_CASE("one-bit high-SNR limit") {
  const double r = 0.3634;
  const double limit = (1 - r) * (1 - r) * 7.0 / (r + r * (1 - r) * 7.0);
  CHECK(asymptotic_siqnr(op(0.125, 1e12, 1, 1)) == doctest::Approx(limit).scale(0).epsilon(1e-9));
  CHECK(limit == doctest::Approx(1.4307).scale(0).epsilon(1e-4));
}

TEST_CASE("closed form agrees with the power-term route") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 0.4), b(0.02, 0.9), s(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double rd = u(gen), ra = u(gen), beta = b(gen), snr = std::pow(10.0, s(gen));
    const double lhs = asymptotic_siqnr(rd, ra, beta, snr);
    CHECK(std::abs(lhs / siqnr_from_terms(rd, ra, beta, snr) - 1.0) < 1e-12);
  }
  const double direct = asymptotic_rate(op(0.125, 10.0, 3, 3));
  const double other = std::log2(1.0 + siqnr_from_terms(rho(3), rho(3), 0.125, 10.0));
  CHECK(std::abs(direct - other) < 1e-12);
}

TEST_CASE("five-bit converters keep 99 percent of the ideal rate at -10 dB") {
  const double snr = db_to_linear(-10.0);
  CHECK(asymptotic_rate(op(0.125, snr, 5, 5)) >=
        0.99 * asymptotic_rate(op(0.125, snr, 0, 0)));
  CHECK(asymptotic_rate(op(0.125, snr, 0, 0)) ==
        doctest::Approx(std::log2(1.7)).scale(0).epsilon(1e-12));
}

TEST_CASE("benchmark rates and degradation factors") {
  const auto ideal = benchmark_rates(op(0.125, 3.0, 0, 0));
  CHECK(ideal.alpha_ad == 1.0);
  CHECK(ideal.alpha_da == 1.0);
  CHECK(ideal.rate == doctest::Approx(ideal.rate_ideal));
  CHECK(ideal.rate_ideal_adc == doctest::Approx(ideal.rate_ideal));
  CHECK(ideal.rate_ideal_dac == doctest::Approx(ideal.rate_ideal));
  CHECK(ideal.nominal_snr == doctest::Approx(21.0));

  for (int bits = 1; bits <= 8; ++bits) {
    for (double snr : {0.01, 1.0, 100.0}) {
      const auto rep = benchmark_rates(op(0.125, snr, bits, bits));
      CHECK(rep.alpha_da > rep.alpha_ad);
      CHECK(rep.alpha_ad > 0.0);
      CHECK(rep.alpha_da <= 1.0);
      CHECK(rep.rate <= std::min(rep.rate_ideal_dac, rep.rate_ideal_adc) + 1e-15);
      CHECK(std::max(rep.rate_ideal_dac, rep.rate_ideal_adc) <= rep.rate_ideal);
      CHECK(std::abs(asymptotic_rate(op(0.125, snr, 0, bits)) - rep.rate_ideal_dac) <
            1e-12);
      CHECK(std::abs(asymptotic_rate(op(0.125, snr, bits, 0)) - rep.rate_ideal_adc) <
            1e-12);
    }
  }
}

TEST_CASE("equal distortion on both sides hurts the ADC side more") {
  for (double r : {0.001, 0.05, 0.3, 0.9}) {
    for (double beta : {0.05, 0.25, 0.49}) {
      for (double snr : {1e-3, 1.0, 1e3}) {
        CHECK(alpha_da(r, snr) > alpha_ad(r, beta, snr));
      }
    }
  }
}

TEST_CASE("DAC rate loss") {
  CHECK(rate_loss_dac(op(0.125, 10.0, 0, 6)) == 0.0);
  CHECK(rate_loss_dac(op(0.125, 1e-9, 3, 6)) < 1e-8);
  CHECK(rate_loss_dac(op(0.125, 1e3, 4, 6)) <= 2.0);
  for (int d = 1; d <= 8; ++d) {
    for (int a = 1; a <= 8; ++a) {
      for (double snr : {1e-2, 1.0, 1e2}) {
        CHECK(rate_loss_dac(op(0.125, snr, d, a)) > 0.0);
      }
    }
  }
}

TEST_CASE("low-SNR slope") {
  CHECK(low_snr_loss_slope(op(0.125, 1.0, 0, 6)) == 0.0);
  const double expected = 0.03454 * (1.0 - 0.0006642) * 7.0 / std::log(2.0);
  const double slope = low_snr_loss_slope(op(0.125, 1.0, 3, 6));
  CHECK(slope == doctest::Approx(expected).scale(0).epsilon(1e-12));
  CHECK(slope == doctest::Approx(0.3486).scale(0).epsilon(1e-3));
  CHECK(rate_loss_dac(op(0.125, 1e-3, 3, 6)) / 1e-3 ==
        doctest::Approx(slope).scale(0).epsilon(0.02));
  // 1/β - 1 goes from 7 to 14.
  CHECK(low_snr_loss_slope(op(1.0 / 15.0, 1.0, 3, 6)) ==
        doctest::Approx(2.0 * slope).scale(0).epsilon(1e-12));
}

TEST_CASE("high-SNR DAC loss") {
  CHECK(high_snr_loss_dac(0.0, rho(6), 0.125) == 0.0);
  CHECK(high_snr_loss_dac(1e-12, rho(6), 0.125) < 1e-9);
  const double l4 = high_snr_loss_dac(Resolution::bits(4), Resolution::bits(6), 0.125);
  const double l5 = high_snr_loss_dac(Resolution::bits(5), Resolution::bits(6), 0.125);
  CHECK(l4 <= 2.0);
  CHECK(l4 > l5);
  for (int d = 1; d <= 8; ++d) {
    CHECK(std::abs(rate_loss_dac(op(0.125, 1e6, d, 6)) -
                   high_snr_loss_dac(rho(d), rho(6), 0.125)) < 1e-3);
  }
  CHECK_THROWS(high_snr_loss_dac(0.1, 0.0, 0.125));
}

TEST_CASE("high-SNR ADC loss is the limit of the ADC rate loss") {
  for (int a = 1; a <= 8; ++a) {
    CHECK(std::abs(rate_loss_adc(op(0.125, 1e7, 6, a)) -
                   high_snr_loss_adc(rho(6), rho(a), 0.125)) < 1e-3);
  }
  CHECK(rate_loss_adc(op(0.125, 10.0, 6, 0)) == 0.0);
}

TEST_CASE("DAC planner golden values") {
  const double budgets[] = {6.0, 4.0, 2.0, 0.5};
  const int expected[] = {2, 3, 4, 6};
  for (int i = 0; i < 4; ++i) {
    CAPTURE(budgets[i]);
    CHECK(plan_dac_bits({6, budgets[i], 0.125}).bits == expected[i]);
  }
  // ⌈6 + ½log₂(1/8)⌉ = ⌈4.5⌉
  CHECK(plan_dac_bits({6, 1.0, 0.125}).bits_approx_b == 5);
}

TEST_CASE("DAC planner meets its budget under the model it solves") {
  for (double r1 : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    for (double beta : {1.0 / 64, 1.0 / 16, 0.125, 0.25}) {
      CAPTURE(r1);
      CAPTURE(beta);
      const auto plan = plan_dac_bits({6, r1, beta});
      const double loss = high_snr_loss_dac(distortion_factor_approx(plan.bits),
                                            rho(6), beta);
      CHECK(loss <= r1 + 1e-12);
      CHECK(plan.loss_high_resolution == doctest::Approx(loss));
      if (plan.bits > 1) {
        CHECK(high_snr_loss_dac(distortion_factor_approx(plan.bits - 1), rho(6),
                                beta) > r1);
      }
    }
  }
}

TEST_CASE("four times the load costs one DAC bit") {
  const int b1 = plan_dac_bits({6, 1.0, 1.0 / 64}).bits_approx_b;
  const int b2 = plan_dac_bits({6, 1.0, 1.0 / 16}).bits_approx_b;
  const int b3 = plan_dac_bits({6, 1.0, 1.0 / 4}).bits_approx_b;
  CHECK(b1 == 3);
  CHECK(b2 == b1 + 1);
  CHECK(b3 == b2 + 1);
}

TEST_CASE("infeasible DAC budget") {
  CHECK_THROWS_AS(plan_dac_bits({1, 2.0, 0.99}), InfeasibleBudget);
  CHECK_THROWS(plan_dac_bits({6, 0.0, 0.125}));
  CHECK_THROWS(plan_dac_bits({6, 1.0, 1.0}));
}

TEST_CASE("ADC planner") {
  CHECK(plan_adc_bits({6, 1.0, 0.125}) == 8);
  CHECK(plan_adc_bits({6, std::log2(5.0), 0.125}) == 7);
  int prev = 0;
  for (double beta : {0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 64}) {
    const int b = plan_adc_bits({6, 1.0, beta});
    CHECK(b >= prev);
    prev = b;
  }
  CHECK(plan_adc_bits({1, 10.0, 0.5}) == 1);
}

TEST_CASE("rate grid") {
  std::vector<Resolution> bits;
  for (int b = 1; b <= 8; ++b) bits.push_back(Resolution::bits(b));
  bits.push_back(Resolution::ideal());
  const auto g = rate_grid(op(0.125, 0.1, 0, 0), bits, bits);
  REQUIRE(g.rows() == 9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    for (Eigen::Index j = 0; j < 9; ++j) {
      CHECK(g(i, j) <= g(8, 8));
      if (i > 0) CHECK(g(i, j) >= g(i - 1, j));
      if (j > 0) CHECK(g(i, j) >= g(i, j - 1));
    }
  }
  CHECK(g(4, 4) >= 0.99 * g(8, 8));
  CHECK(g(8, 8) == doctest::Approx(0.7655).scale(0).epsilon(1e-4));
}

TEST_CASE("rate increases with SNR") {
  double prev = -1.0;
  for (double db = -20.0; db <= 40.0; db += 2.5) {
    const double r = asymptotic_rate(op(0.125, db_to_linear(db), 3, 4));
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("guarded ceiling") {
  CHECK(guarded_ceil(3.0) == 3);
  CHECK(guarded_ceil(3.0 + 1e-12) == 3);
  CHECK(guarded_ceil(3.1) == 4);
  CHECK(guarded_ceil(-0.5) == 0);
}

TEST_CASE("rho models") {
  CHECK(rho_of(Resolution::bits(3)) == 0.03454);
  CHECK(rho_of(Resolution::bits(3), RhoModel::kHighResolution) ==
        distortion_factor_approx(3));
  CHECK(rho_of(Resolution::ideal(), RhoModel::kHighResolution) == 0.0);
}
