#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "prefsim/data_gen.hpp"
#include "prefsim/errors.hpp"
#include "prefsim/experiments.hpp"
#include "prefsim/fitting.hpp"
#include "prefsim/random.hpp"
#include "prefsim/version.hpp"

namespace {

using namespace prefsim;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
  ExperimentConfig config;
  std::string algorithm = "rlpo";
  std::string out;
  std::string stats;
  std::size_t min_set_size = 2;
  std::size_t max_set_size = 5;
};

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes to --out when given, otherwise stdout.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("out", "cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw ConfigError("out", "failed writing '" + path + "'");
}

void run_sweep_command(Options& opt, Algorithm algorithm) {
  opt.config.algorithm = algorithm;
  opt.config.validate();
  const Curve curve = run_sweep(opt.config);
  const std::string hash = config_hash(opt.config);
  emit(opt.out, [&](std::ostream& os) { write_curve_csv(os, curve, hash); });
  if (!opt.out.empty()) {
    emit(opt.out + ".meta", [&](std::ostream& os) { write_metadata(os, opt.config, curve); });
  }
}

void run_theory_command(const Options& opt) {
  const auto report = run_theory_check(opt.config, opt.min_set_size, opt.max_set_size);
  emit(opt.out, [&](std::ostream& os) { os << format_theory_report(report); });
}

void run_gen_data(const Options& opt) {
  opt.config.validate();
  const GenerationConfig gen{opt.config.base_policy(opt.config.pool_m2), opt.config.p_star(),
                             opt.config.set_size, opt.config.num_data};
  Rng rng(derive_seed(opt.config.master_seed, {opt.config.num_data}));
  const SufficientStats stats = sample_dataset(gen, rng);
  emit(opt.out, [&](std::ostream& os) { write_stats(os, stats); });
}

void run_fit(Options& opt) {
  opt.config.algorithm = parse_algorithm(opt.algorithm);
  std::ifstream in(opt.stats, std::ios::binary);
  if (!in) throw ConfigError("stats", "cannot open '" + opt.stats + "'");
  const SufficientStats stats = read_stats(in);
  opt.config.set_size = stats.set_size();
  opt.config.num_data = stats.num_data();
  opt.config.validate();
  const BasePolicy base = opt.config.base_policy(opt.config.pool_m2);
  const FitSettings settings = opt.config.fit_settings();
  FitResult<PolicyParams> fit;
  switch (opt.config.algorithm) {
    case Algorithm::kRlpo: fit = fit_rlpo(stats, base, settings); break;
    case Algorithm::kDpo: fit = fit_dpo(stats, base, settings); break;
    case Algorithm::kIl: fit = fit_il(stats, base, settings); break;
    case Algorithm::kSlic: fit = fit_slic(stats, base, settings); break;
  }
  const CategoryMass mass = category_mass(fit.params, base.pool());
  emit(opt.out, [&](std::ostream& os) {
    os << "algorithm=" << to_string(opt.config.algorithm) << '\n'
       << "theta1=" << real(fit.params.theta1) << '\n'
       << "theta2=" << real(fit.params.theta2) << '\n'
       << "p_m1=" << real(mass.q1) << '\n'
       << "loss=" << real(fit.loss_value) << '\n'
       << "converged=" << (fit.converged ? "true" : "false") << '\n'
       << "minimizer_exists=" << (fit.minimizer_exists ? "true" : "false") << '\n';
  });
}

void add_options(CLI::App& app, Options& opt) {
  auto& c = opt.config;
  app.add_option("--pool-m1", c.pool_m1, "Size of message pool M1");
  app.add_option("--pool-m2", c.pool_m2, "Size of message pool M2");
  app.add_option("--base-mass1", c.base_mass1, "Base policy mass on M1");
  app.add_option("--p1", c.p1, "Probability of the type preferring M1");
  app.add_option("--beta", c.beta, "KL regularization weight");
  app.add_option("--delta", c.delta, "SLiC hinge margin");
  app.add_option("--set-size", c.set_size, "Choice set size");
  app.add_option("--num-data", c.num_data, "Dataset size for |M2| sweeps and gen-data");
  app.add_option("--seeds", c.num_seeds, "Seeds per sweep point");
  app.add_option("--master-seed", c.master_seed, "Master random seed");
  app.add_option("--data-grid", c.data_grid, "Dataset sizes for sweep-rlpo/sweep-dpo")->delimiter(',');
  app.add_option("--m2-grid", c.m2_grid, "|M2| values for sweep-il/sweep-slic")->delimiter(',');
  app.add_option("--tol", c.tol, "Solver relative tolerance");
  app.add_option("--max-iter", c.max_iter, "Solver iteration cap");
  app.add_option("--threads", c.threads, "Worker threads (results do not depend on it)");
  app.add_option("--algorithm", opt.algorithm, "Fitter used by fit: rlpo, dpo, il, slic");
  app.add_option("--stats", opt.stats, "Sufficient-statistics file read by fit");
  app.add_option("--min-set-size", opt.min_set_size, "Smallest set size for theory-check");
  app.add_option("--max-set-size", opt.max_set_size, "Largest set size for theory-check");
  app.add_option("--out", opt.out, "Output path (stdout when omitted)");
  app.set_config("--config", "", "Flat key=value file; any key may be overridden by its flag");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-learning failure-mode simulator", "prefsim"};
  app.set_version_flag("--version", std::string(prefsim::kVersion));
  app.require_subcommand(1);
  Options opt;
  add_options(app, opt);

  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  auto* sweep_rlpo = sub("sweep-rlpo", "RLPO sweep over dataset size");
  auto* sweep_dpo = sub("sweep-dpo", "DPO sweep over dataset size");
  auto* sweep_il = sub("sweep-il", "IL sweep over |M2|");
  auto* sweep_slic = sub("sweep-slic", "SLiC sweep over |M2|");
  auto* theory = sub("theory-check", "Failure predictions and event frequencies");
  auto* gen = sub("gen-data", "Sample one dataset and write its sufficient statistics");
  auto* fit = sub("fit", "Fit one algorithm on a sufficient-statistics file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep_rlpo) run_sweep_command(opt, Algorithm::kRlpo);
    else if (*sweep_dpo) run_sweep_command(opt, Algorithm::kDpo);
    else if (*sweep_il) run_sweep_command(opt, Algorithm::kIl);
    else if (*sweep_slic) run_sweep_command(opt, Algorithm::kSlic);
    else if (*theory) run_theory_command(opt);
    else if (*gen) run_gen_data(opt);
    else if (*fit) run_fit(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedFormat& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
