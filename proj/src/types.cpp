#include "qmimo/types.hpp"

#include <charconv>
#include <cmath>

namespace qmimo {

Resolution Resolution::bits(int b) {
  if (b < 1) {
    throw std::invalid_argument("resolution must be at least 1 bit, got " +
                                std::to_string(b));
  }
  return Resolution{b};
}

Resolution Resolution::parse(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "ideal") {
    return ideal();
  }
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || value < 1) {
    throw ConfigError("invalid resolution '" + std::string(text) +
                      "' (expected a positive integer or 'inf')");
  }
  return Resolution{value};
}

int Resolution::bits() const {
  if (is_ideal()) {
    throw std::logic_error("ideal converter has no finite bit count");
  }
  return bits_;
}

std::string Resolution::to_string() const {
  return is_ideal() ? std::string("inf") : std::to_string(bits_);
}

void SystemConfig::validate() const {
  if (n_antennas < 1 || n_users < 1) {
    throw ConfigError("n_antennas and n_users must be positive");
  }
  if (n_users >= n_antennas) {
    throw ConfigError("n_users must be smaller than n_antennas (beta < 1)");
  }
  if (!(total_power > 0.0) || !std::isfinite(total_power)) {
    throw ConfigError("total_power must be positive and finite");
  }
  if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
    throw ConfigError("noise_power must be positive and finite");
  }
}

SystemConfig SystemConfig::with_snr(int n_antennas, int n_users, double snr,
                                    Resolution dac, Resolution adc,
                                    double total_power) {
  SystemConfig cfg;
  cfg.n_antennas = n_antennas;
  cfg.n_users = n_users;
  cfg.total_power = total_power;
  cfg.noise_power = total_power / snr;
  cfg.dac = dac;
  cfg.adc = adc;
  return cfg;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace qmimo
