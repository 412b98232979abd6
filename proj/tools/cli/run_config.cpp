#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace qmimo::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (!in || !in.eof() || !std::isfinite(v)) {
    throw ConfigError("invalid number '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view text) {
  const std::string s = trim(text);
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("invalid integer '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + s + "'");
}

std::string default_workers() {
  return std::to_string(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const std::vector<KeyInfo>& config_schema() {
  static const std::vector<KeyInfo> schema = {
      {"n_antennas", "128", "base-station antennas N", true},
      {"n_users", "16", "single-antenna users M (beta = M/N)", true},
      {"total_power", "1", "total transmit power P (linear)", true},
      {"snr_db", "-10:30:64", "SNR grid in dB: start:stop:count or a list", true},
      {"converters", "inf/inf,inf/6,3/inf,3/6,5/5",
       "rate-sweep settings as dac/adc bit pairs", true},
      {"contour_snr_db", "-10", "SNR of the contour grid in dB", true},
      {"dac_bits_grid", "1..8,inf", "DAC resolutions of the contour grid", true},
      {"adc_bits_grid", "1..8,inf", "ADC resolutions of the contour grid", true},
      {"n_trials", "500", "channel realizations per simulated point", true},
      {"symbols_per_trial", "2000", "symbol vectors per realization", true},
      {"master_seed", "1", "seed of the trial substreams", true},
      {"mode", "true-quantizer",
       "true-quantizer | bussgang-linear | per-term-analytic", true},
      {"simulate", "false", "add Monte Carlo columns to rate-sweep", true},
      {"workers", "", "worker threads (default: hardware threads)", false},
      {"output", "-", "output CSV path, '-' for stdout", false},
      {"raw_dump", "", "optional per-trial record CSV", false},
  };
  return schema;
}

void ConfigSource::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = path + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    set(trim(std::string_view(body).substr(0, eq)),
        trim(std::string_view(body).substr(eq + 1)), where);
  }
}

void ConfigSource::set(const std::string& key, const std::string& value,
                       const std::string& where) {
  const auto& schema = config_schema();
  const bool known = std::any_of(schema.begin(), schema.end(),
                                 [&](const KeyInfo& k) { return k.key == key; });
  if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
  values[key] = value;
  origin[key] = where;
}

std::vector<double> parse_real_grid(std::string_view text) {
  const std::string s = trim(text);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:count");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    const int n = parse_int<int>(parts[2]);
    if (n < 1) throw ConfigError("range count must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  return out;
}

std::vector<Resolution> parse_bits_grid(std::string_view text) {
  std::vector<Resolution> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(Resolution::parse(item));
      continue;
    }
    const int lo = parse_int<int>(item.substr(0, dots));
    const int hi = parse_int<int>(item.substr(dots + 2));
    if (lo < 1 || hi < lo) throw ConfigError("invalid bit range '" + item + "'");
    for (int b = lo; b <= hi; ++b) out.push_back(Resolution::bits(b));
  }
  if (out.empty()) throw ConfigError("empty bit grid");
  return out;
}

std::vector<ConverterPair> parse_converters(std::string_view text) {
  std::vector<ConverterPair> out;
  for (const auto& item : split(text, ',')) {
    const auto slash = item.find('/');
    if (slash == std::string::npos) {
      throw ConfigError("converter setting '" + item + "' must be dac/adc");
    }
    out.push_back({Resolution::parse(trim(item.substr(0, slash))),
                   Resolution::parse(trim(item.substr(slash + 1)))});
  }
  return out;
}

SystemConfig RunConfig::system(Resolution dac, Resolution adc,
                               double snr_db_value) const {
  return SystemConfig::with_snr(n_antennas, n_users, db_to_linear(snr_db_value),
                                dac, adc, total_power);
}

RunConfig resolve(const ConfigSource& source) {
  RunConfig cfg;
  std::map<std::string, std::string> values;
  for (const auto& k : config_schema()) {
    values[std::string(k.key)] =
        k.key == "workers" ? default_workers() : std::string(k.default_value);
  }
  for (const auto& [k, v] : source.values) values[k] = v;

  auto field = [&](const std::string& key, auto&& parse) {
    try {
      parse(values.at(key));
    } catch (const std::exception& e) {
      const auto it = source.origin.find(key);
      const std::string where =
          it == source.origin.end() ? std::string("default") : it->second;
      throw ConfigError(where + ": field '" + key + "': " + e.what());
    }
  };

  field("n_antennas", [&](auto& v) { cfg.n_antennas = parse_int<int>(v); });
  field("n_users", [&](auto& v) { cfg.n_users = parse_int<int>(v); });
  field("total_power", [&](auto& v) {
    cfg.total_power = parse_double(v);
    if (!(cfg.total_power > 0.0)) throw ConfigError("must be positive");
  });
  field("snr_db", [&](auto& v) { cfg.snr_db = parse_real_grid(v); });
  field("converters", [&](auto& v) { cfg.converters = parse_converters(v); });
  field("contour_snr_db", [&](auto& v) { cfg.contour_snr_db = parse_double(v); });
  field("dac_bits_grid", [&](auto& v) { cfg.dac_bits_grid = parse_bits_grid(v); });
  field("adc_bits_grid", [&](auto& v) { cfg.adc_bits_grid = parse_bits_grid(v); });
  field("n_trials", [&](auto& v) {
    cfg.n_trials = parse_int<int>(v);
    if (cfg.n_trials < 1) throw ConfigError("must be at least 1");
  });
  field("symbols_per_trial", [&](auto& v) {
    cfg.symbols_per_trial = parse_int<int>(v);
    if (cfg.symbols_per_trial < 2) throw ConfigError("must be at least 2");
  });
  field("master_seed",
        [&](auto& v) { cfg.master_seed = parse_int<std::uint64_t>(v); });
  field("mode", [&](auto& v) { cfg.mode = parse_sim_mode(trim(v)); });
  field("simulate", [&](auto& v) { cfg.simulate = parse_bool(v); });
  field("workers", [&](auto& v) {
    cfg.workers = parse_int<int>(v);
    if (cfg.workers < 1) throw ConfigError("must be at least 1");
  });
  field("output", [&](auto& v) { cfg.output = trim(v); });
  field("raw_dump", [&](auto& v) { cfg.raw_dump = trim(v); });

  field("n_users", [&](auto&) {
    SystemConfig probe;
    probe.n_antennas = cfg.n_antennas;
    probe.n_users = cfg.n_users;
    probe.validate();
  });
  if (cfg.snr_db.empty()) throw ConfigError("field 'snr_db': empty grid");
  if (cfg.converters.empty()) throw ConfigError("field 'converters': empty list");
  return cfg;
}

std::string RunConfig::describe() const {
  auto join_bits = [](const std::vector<Resolution>& v) {
    std::string s;
    for (const auto& r : v) s += (s.empty() ? "" : ",") + r.to_string();
    return s;
  };
  std::string snr;
  for (double d : snr_db) snr += (snr.empty() ? "" : ",") + format_number(d);
  std::string conv;
  for (const auto& c : converters) conv += (conv.empty() ? "" : ",") + c.label();

  std::ostringstream os;
  os << "n_antennas=" << n_antennas << " n_users=" << n_users
     << " total_power=" << format_number(total_power) << " snr_db=" << snr
     << " converters=" << conv
     << " contour_snr_db=" << format_number(contour_snr_db)
     << " dac_bits_grid=" << join_bits(dac_bits_grid)
     << " adc_bits_grid=" << join_bits(adc_bits_grid)
     << " n_trials=" << n_trials << " symbols_per_trial=" << symbols_per_trial
     << " master_seed=" << master_seed << " mode=" << to_string(mode)
     << " simulate=" << (simulate ? "true" : "false");
  return os.str();
}

}  // namespace qmimo::cli
