#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmimo/montecarlo.hpp"
#include "qmimo/types.hpp"

namespace qmimo::cli {

struct ConverterPair {
  Resolution dac;
  Resolution adc;

  std::string label() const { return dac.to_string() + "/" + adc.to_string(); }
};

/// Resolved settings for rate-sweep, contour and validate.
struct RunConfig {
  int n_antennas = 128;
  int n_users = 16;
  double total_power = 1.0;
  std::vector<double> snr_db;
  std::vector<ConverterPair> converters;
  double contour_snr_db = -10.0;
  std::vector<Resolution> dac_bits_grid;
  std::vector<Resolution> adc_bits_grid;
  int n_trials = 500;
  int symbols_per_trial = 2000;
  std::uint64_t master_seed = 1;
  SimMode mode = SimMode::kTrueQuantizer;
  bool simulate = false;
  int workers = 1;
  std::string output = "-";
  std::string raw_dump;

  SystemConfig system(Resolution dac, Resolution adc, double snr_db) const;
  /// "key=value" pairs for every setting that affects results, in schema order.
  std::string describe() const;
};

struct KeyInfo {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
  bool in_header;  // part of the self-describing CSV header
};

/// Every accepted key, in canonical order.
const std::vector<KeyInfo>& config_schema();

/// Raw key → value text, remembering where each value came from.
struct ConfigSource {
  std::map<std::string, std::string> values;
  std::map<std::string, std::string> origin;  // "file:line" or "--flag"

  /// Parses `key = value` lines; '#' starts a comment. Throws ConfigError
  /// naming the file, line and field.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value,
           const std::string& where);
};

/// Applies defaults then `source`, validating every field.
RunConfig resolve(const ConfigSource& source);

/// "a:b:n" (n points from a to b inclusive) or a comma list.
std::vector<double> parse_real_grid(std::string_view text);
/// Comma list of integers, "lo..hi" ranges and "inf".
std::vector<Resolution> parse_bits_grid(std::string_view text);
/// Comma list of "dac/adc" pairs.
std::vector<ConverterPair> parse_converters(std::string_view text);

/// 12 significant digits, '.' decimal point.
std::string format_number(double v);

}  // namespace qmimo::cli
