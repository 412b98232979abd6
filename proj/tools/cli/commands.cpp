#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "qmimo/analysis.hpp"
#include "qmimo/montecarlo.hpp"
#include "qmimo/quantization.hpp"
#include "run_config.hpp"
#include "validate.hpp"

namespace qmimo::cli {
namespace {

// Config-file path plus one `--key-name` flag per schema key.
struct ConfigFlags {
  std::string path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", path, "key = value config file");
    for (const auto& k : config_schema()) {
      const std::string key(k.key);
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      options[key] = app->add_option(flag, values[key], std::string(k.help));
    }
  }

  RunConfig resolve_config() const {
    ConfigSource source;
    if (!path.empty()) source.load_file(path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) source.set(key, values.at(key), opt->get_name());
    }
    return resolve(source);
  }
};

// Output target: stdout for "-", otherwise a file opened for writing.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    out_ = file_.get();
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

int cmd_rate_sweep(const RunConfig& rc, std::ostream& out) {
  Sink sink(rc.output, out);
  std::unique_ptr<std::ofstream> dump;
  if (rc.simulate && !rc.raw_dump.empty()) {
    dump = std::make_unique<std::ofstream>(rc.raw_dump, std::ios::binary);
    if (!*dump) throw ConfigError("cannot open raw_dump '" + rc.raw_dump + "'");
    *dump << "# qmimo rate-sweep trial records " << rc.describe() << '\n'
          << "config,snr_db,trial,user,siqnr,rate\n";
  }

  std::vector<double> snrs;
  for (double db : rc.snr_db) snrs.push_back(db_to_linear(db));

  std::ostream& os = sink.stream();
  os << "# qmimo rate-sweep " << rc.describe() << '\n';
  os << "snr_db,closed_form_rate,sim_rate_mean,sim_rate_se,config\n";
  for (const auto& conv : rc.converters) {
    const SystemConfig base = rc.system(conv.dac, conv.adc, 0.0);
    std::vector<SimEstimate> sim;
    if (rc.simulate) {
      SimOptions opts;
      opts.n_trials = rc.n_trials;
      opts.symbols_per_trial = rc.symbols_per_trial;
      opts.mode = rc.mode;
      opts.master_seed = rc.master_seed;
      opts.workers = rc.workers;
      std::vector<TrialRecord> records;
      sim = estimate_rate_curve(base, snrs, opts, dump ? &records : nullptr);
      for (const auto& rec : records) {
        for (std::size_t p = 0; p < snrs.size(); ++p) {
          for (std::size_t k = 0; k < rec.siqnr[p].size(); ++k) {
            *dump << conv.label() << ',' << format_number(rc.snr_db[p]) << ','
                  << rec.trial << ',' << k << ','
                  << format_number(rec.siqnr[p][k]) << ','
                  << format_number(rec.rate[p]) << '\n';
          }
        }
      }
    }
    for (std::size_t i = 0; i < snrs.size(); ++i) {
      SystemConfig cfg = base;
      cfg.noise_power = cfg.total_power / snrs[i];
      os << format_number(rc.snr_db[i]) << ','
         << format_number(asymptotic_rate(cfg)) << ',';
      if (rc.simulate) {
        os << format_number(sim[i].mean_rate) << ','
           << format_number(sim[i].standard_error);
      } else {
        os << ',';
      }
      os << ',' << conv.label() << '\n';
    }
  }
  os.flush();
  return kOk;
}

int cmd_contour(const RunConfig& rc, std::ostream& out) {
  Sink sink(rc.output, out);
  std::ostream& os = sink.stream();
  SystemConfig probe = rc.system(Resolution::ideal(), Resolution::ideal(),
                                 rc.contour_snr_db);
  const Eigen::MatrixXd grid =
      rate_grid(probe.operating_point(), rc.dac_bits_grid, rc.adc_bits_grid);
  os << "# qmimo contour " << rc.describe() << '\n';
  os << "b_da,b_ad,rate\n";
  for (std::size_t i = 0; i < rc.dac_bits_grid.size(); ++i) {
    for (std::size_t j = 0; j < rc.adc_bits_grid.size(); ++j) {
      os << rc.dac_bits_grid[i].to_string() << ','
         << rc.adc_bits_grid[j].to_string() << ','
         << format_number(grid(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(j)))
         << '\n';
    }
  }
  os.flush();
  return kOk;
}

struct PlanArgs {
  std::optional<int> fixed_adc;
  std::optional<int> fixed_dac;
  double loss = 0.0;
  double beta = 0.0;
  std::optional<double> snr_check_db;
  std::string csv;
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> rows;
  const PlannerQuery q{a.fixed_adc ? *a.fixed_adc : *a.fixed_dac, a.loss, a.beta};
  auto emit = [&](const std::string& key, const std::string& value,
                  const std::string& text) {
    rows.emplace_back(key, value);
    out << text << '\n';
  };

  if (a.fixed_adc) {
    const DacPlan plan = plan_dac_bits(q);
    out << "fixed ADC resolution: " << q.fixed_bits
        << " bits, DAC loss budget r1 = " << format_number(q.loss_budget)
        << " bits/s/Hz, beta = " << format_number(q.beta) << '\n';
    emit("b_da", std::to_string(plan.bits),
         "planned DAC resolution: " + std::to_string(plan.bits) +
             " bits (continuous solution " +
             format_number(plan.continuous_bits) + ")");
    emit("b_da_approx_a", std::to_string(plan.bits_approx_a),
         "  approximation (a), rho_AD << 1: " +
             std::to_string(plan.bits_approx_a) + " bits");
    emit("b_da_approx_b", std::to_string(plan.bits_approx_b),
         "  approximation (b), also beta << 1: " +
             std::to_string(plan.bits_approx_b) + " bits");
    emit("high_snr_loss_high_resolution", format_number(plan.loss_high_resolution),
         "predicted high-SNR loss: " + format_number(plan.loss_high_resolution) +
             " bits/s/Hz (high-resolution DAC distortion), " +
             format_number(plan.loss_table) + " (tabulated DAC distortion)");
    rows.emplace_back("high_snr_loss_table", format_number(plan.loss_table));
    if (a.snr_check_db) {
      const OperatingPoint op{q.beta, db_to_linear(*a.snr_check_db),
                              Resolution::bits(plan.bits),
                              Resolution::bits(q.fixed_bits)};
      const double loss = rate_loss_dac(op);
      emit("loss_at_snr_check", format_number(loss),
           "DAC rate loss at " + format_number(*a.snr_check_db) +
               " dB: " + format_number(loss) + " bits/s/Hz");
    }
  } else {
    const int bits = plan_adc_bits(q);
    out << "fixed DAC resolution: " << q.fixed_bits
        << " bits, ADC loss budget r2 = " << format_number(q.loss_budget)
        << " bits/s/Hz, beta = " << format_number(q.beta) << '\n';
    emit("b_ad", std::to_string(bits),
         "planned ADC resolution: " + std::to_string(bits) + " bits");
    const double high = high_snr_loss_adc(
        distortion_factor(Resolution::bits(q.fixed_bits)),
        distortion_factor(Resolution::bits(bits)), q.beta);
    emit("high_snr_loss", format_number(high),
         "predicted high-SNR loss: " + format_number(high) + " bits/s/Hz");
    if (a.snr_check_db) {
      const OperatingPoint op{q.beta, db_to_linear(*a.snr_check_db),
                              Resolution::bits(q.fixed_bits),
                              Resolution::bits(bits)};
      const double loss = rate_loss_adc(op);
      emit("loss_at_snr_check", format_number(loss),
           "ADC rate loss at " + format_number(*a.snr_check_db) +
               " dB: " + format_number(loss) + " bits/s/Hz");
    }
  }

  if (!a.csv.empty()) {
    std::ofstream csv(a.csv, std::ios::binary);
    if (!csv) throw ConfigError("cannot open csv file '" + a.csv + "'");
    csv << "key,value\n";
    for (const auto& [k, v] : rows) csv << k << ',' << v << '\n';
  }
  return kOk;
}

int cmd_validate(const RunConfig& rc, std::ostream& out) {
  bool all = true;
  for (const auto& suite : run_validation(rc.master_seed)) {
    out << (suite.passed ? "PASS " : "FAIL ") << suite.name << ": "
        << suite.detail << '\n';
    all = all && suite.passed;
  }
  return all ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Quantized massive-MIMO downlink: rates, sweeps and converter planning"};
  app.name(args.empty() ? "qmimo" : args.front());
  app.require_subcommand(1);

  ConfigFlags sweep_flags, contour_flags, validate_flags;
  auto* sweep = app.add_subcommand("rate-sweep", "closed-form (and simulated) rate vs SNR");
  sweep_flags.attach(sweep);
  auto* contour = app.add_subcommand("contour", "closed-form rate on a DAC x ADC bit grid");
  contour_flags.attach(contour);
  auto* validate = app.add_subcommand("validate", "run the invariant suites");
  validate_flags.attach(validate);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "converter resolution for a rate-loss budget");
  auto* adc_opt = plan->add_option("--fixed-adc", plan_args.fixed_adc,
                                   "known ADC bits; plan the DAC");
  auto* dac_opt = plan->add_option("--fixed-dac", plan_args.fixed_dac,
                                   "known DAC bits; plan the ADC");
  adc_opt->excludes(dac_opt);
  dac_opt->excludes(adc_opt);
  plan->add_option("--loss", plan_args.loss, "rate-loss budget in bits/s/Hz")
      ->required();
  plan->add_option("--beta", plan_args.beta, "user load M/N")->required();
  plan->add_option("--snr-check", plan_args.snr_check_db,
                   "also report the exact loss at this SNR (dB)");
  plan->add_option("--csv", plan_args.csv, "write key,value results here");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (plan->parsed() && !plan_args.fixed_adc && !plan_args.fixed_dac) {
      throw CLI::ValidationError("plan", "one of --fixed-adc or --fixed-dac is required");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args, out);
    if (sweep->parsed()) return cmd_rate_sweep(sweep_flags.resolve_config(), out);
    if (contour->parsed()) return cmd_contour(contour_flags.resolve_config(), out);
    if (validate->parsed()) return cmd_validate(validate_flags.resolve_config(), out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleBudget& e) {
    err << "infeasible budget: " << e.what() << '\n';
    return kInfeasibleBudget;
  } catch (const SimulationError& e) {
    err << "simulation failed: " << e.what() << '\n';
    return kSimulationFailure;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace qmimo::cli
