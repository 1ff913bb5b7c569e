#include "prefsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "prefsim/data_gen.hpp"
#include "prefsim/errors.hpp"
#include "prefsim/random.hpp"
#include "prefsim/version.hpp"

namespace prefsim {

namespace {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

// Runs task(i) for i in [0, count) on up to `threads` workers. If tasks throw,
// the exception from the lowest index is rethrown so failures are reproducible.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct SweepPoint {
  std::uint64_t num_data;
  std::uint64_t pool_m2;
  std::uint64_t sweep_value;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  if (config.algorithm == Algorithm::kRlpo || config.algorithm == Algorithm::kDpo) {
    for (auto d : config.data_grid) points.push_back({d, config.pool_m2, d});
  } else {
    for (auto m2 : config.m2_grid) points.push_back({config.num_data, m2, m2});
  }
  return points;
}

struct SeedOutcome {
  double p_m1;
  bool exists;
};

SeedOutcome run_seed(const ExperimentConfig& config, const SweepPoint& point, std::uint64_t seed) {
  const BasePolicy base = config.base_policy(point.pool_m2);
  const GenerationConfig gen{base, config.p_star(), config.set_size, point.num_data};
  Rng rng(derive_seed(config.master_seed, {point.sweep_value, seed}));
  const SufficientStats stats = sample_dataset(gen, rng);
  const FitSettings settings = config.fit_settings();
  FitResult<PolicyParams> fit;
  switch (config.algorithm) {
    case Algorithm::kRlpo:
      fit = fit_rlpo(stats, base, settings);
      break;
    case Algorithm::kDpo:
      fit = fit_dpo(stats, base, settings);
      break;
    case Algorithm::kIl:
      fit = fit_il(stats, base, settings);
      break;
    case Algorithm::kSlic:
      fit = fit_slic(stats, base, settings);
      break;
  }
  return {category_mass(fit.params, base.pool()).q1, fit.minimizer_exists};
}

void require_algorithm(const ExperimentConfig& config, std::initializer_list<Algorithm> allowed,
                       const char* runner) {
  if (std::find(allowed.begin(), allowed.end(), config.algorithm) == allowed.end()) {
    throw ConfigError("algorithm", std::string(runner) + " does not accept algorithm '" +
                                       to_string(config.algorithm) + "'");
  }
}

void check_grid(const std::vector<std::uint64_t>& grid, const char* field) {
  if (grid.empty()) throw ConfigError(field, "grid must be nonempty");
  std::set<std::uint64_t> seen;
  for (auto v : grid) {
    if (v < 1) throw ConfigError(field, "grid values must be positive");
    if (!seen.insert(v).second) throw ConfigError(field, "grid values must be distinct");
  }
}

Curve assemble(const ExperimentConfig& config, const std::vector<PointResult>& results) {
  const auto points = sweep_points(config);
  Curve curve;
  curve.sweep_name = config.algorithm == Algorithm::kRlpo || config.algorithm == Algorithm::kDpo
                         ? "num_data"
                         : "pool_m2";
  for (std::size_t i = 0; i < points.size(); ++i) {
    curve.rows.push_back(summarize(static_cast<double>(points[i].sweep_value), results[i]));
  }
  std::sort(curve.rows.begin(), curve.rows.end(),
            [](const CurveRow& a, const CurveRow& b) { return a.sweep_value < b.sweep_value; });
  return curve;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRlpo:
      return "rlpo";
    case Algorithm::kDpo:
      return "dpo";
    case Algorithm::kIl:
      return "il";
    case Algorithm::kSlic:
      return "slic";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kRlpo, Algorithm::kDpo, Algorithm::kIl, Algorithm::kSlic}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("algorithm", "unknown algorithm '" + name + "' (expected rlpo, dpo, il or slic)");
}

void ExperimentConfig::validate() const {
  if (pool_m1 < 1) throw ConfigError("pool-m1", "must be at least 1");
  if (pool_m2 < 1) throw ConfigError("pool-m2", "must be at least 1");
  if (!(base_mass1 > 0.0 && base_mass1 < 1.0)) {
    throw ConfigError("base-mass1", "must lie strictly between 0 and 1");
  }
  if (!(p1 > 0.0 && p1 < 1.0)) throw ConfigError("p1", "must lie strictly between 0 and 1");
  if (!std::isfinite(beta) || beta < 0.0) throw ConfigError("beta", "must be finite and >= 0");
  if (beta == 0.0 && algorithm != Algorithm::kIl) {
    throw ConfigError("beta", "must be positive for " + to_string(algorithm));
  }
  if (!std::isfinite(delta) || delta <= 0.0) throw ConfigError("delta", "must be positive");
  if (set_size < 2) throw ConfigError("set-size", "must be at least 2");
  if (algorithm == Algorithm::kSlic && set_size != 2) {
    throw ConfigError("set-size", "slic is defined for set size 2 only");
  }
  if (num_data < 1) throw ConfigError("num-data", "must be at least 1");
  check_grid(data_grid, "data-grid");
  check_grid(m2_grid, "m2-grid");
  if (num_seeds < 1) throw ConfigError("seeds", "must be at least 1");
  if (!std::isfinite(tol) || tol <= 0.0) throw ConfigError("tol", "must be positive");
  if (max_iter < 1) throw ConfigError("max-iter", "must be at least 1");
  if (threads < 1) throw ConfigError("threads", "must be at least 1");
}

FitSettings ExperimentConfig::fit_settings() const { return {beta, delta, tol, max_iter}; }

BasePolicy ExperimentConfig::base_policy(std::uint64_t m2) const {
  return BasePolicy(base_mass1, MessagePool(pool_m1, m2));
}

std::string resolved_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "algorithm=" << to_string(c.algorithm) << '\n'
      << "pool-m1=" << c.pool_m1 << '\n'
      << "pool-m2=" << c.pool_m2 << '\n'
      << "base-mass1=" << format_real(c.base_mass1) << '\n'
      << "p1=" << format_real(c.p1) << '\n'
      << "beta=" << format_real(c.beta) << '\n'
      << "delta=" << format_real(c.delta) << '\n'
      << "set-size=" << c.set_size << '\n'
      << "num-data=" << c.num_data << '\n'
      << "data-grid=" << join(c.data_grid) << '\n'
      << "m2-grid=" << join(c.m2_grid) << '\n'
      << "seeds=" << c.num_seeds << '\n'
      << "master-seed=" << c.master_seed << '\n'
      << "tol=" << format_real(c.tol) << '\n'
      << "max-iter=" << c.max_iter << '\n';
  return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : resolved_config(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PointResult run_point(const ExperimentConfig& config, std::uint64_t num_data,
                      std::uint64_t pool_m2, std::uint64_t sweep_value) {
  config.validate();
  const SweepPoint point{num_data, pool_m2, sweep_value};
  PointResult out;
  out.p_m1.resize(config.num_seeds);
  std::vector<char> exists(config.num_seeds, 0);
  parallel_for(config.num_seeds, config.threads, [&](std::size_t i) {
    const auto r = run_seed(config, point, i);
    out.p_m1[i] = r.p_m1;
    exists[i] = r.exists ? 1 : 0;
  });
  out.exists.assign(exists.begin(), exists.end());
  return out;
}

CurveRow summarize(double sweep_value, const PointResult& point) {
  CurveRow row;
  row.sweep_value = sweep_value;
  row.n_seeds = point.p_m1.size();
  if (point.p_m1.empty()) return row;
  const auto n = static_cast<double>(point.p_m1.size());
  double sum = 0.0;
  for (double p : point.p_m1) sum += p;
  row.mean_p_m1 = sum / n;
  if (point.p_m1.size() > 1) {
    double ss = 0.0;
    for (double p : point.p_m1) ss += (p - row.mean_p_m1) * (p - row.mean_p_m1);
    row.stderr_p_m1 = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  const auto found = std::count(point.exists.begin(), point.exists.end(), true);
  row.minimizer_exists_rate = static_cast<double>(found) / n;
  return row;
}

std::vector<PointResult> run_sweep_points(const ExperimentConfig& config) {
  config.validate();
  const auto points = sweep_points(config);
  const std::size_t seeds = config.num_seeds;
  std::vector<PointResult> results(points.size());
  std::vector<std::vector<char>> exists(points.size(), std::vector<char>(seeds, 0));
  for (auto& r : results) r.p_m1.resize(seeds);
  parallel_for(points.size() * seeds, config.threads, [&](std::size_t task) {
    const std::size_t p = task / seeds;
    const std::size_t s = task % seeds;
    const auto r = run_seed(config, points[p], s);
    results[p].p_m1[s] = r.p_m1;
    exists[p][s] = r.exists ? 1 : 0;
  });
  for (std::size_t p = 0; p < points.size(); ++p) {
    results[p].exists.assign(exists[p].begin(), exists[p].end());
  }
  return results;
}

Curve run_rlpo_dpo_sweep(const ExperimentConfig& config) {
  require_algorithm(config, {Algorithm::kRlpo, Algorithm::kDpo}, "sweep-rlpo/sweep-dpo");
  return assemble(config, run_sweep_points(config));
}

Curve run_il_sweep(const ExperimentConfig& config) {
  require_algorithm(config, {Algorithm::kIl}, "sweep-il");
  return assemble(config, run_sweep_points(config));
}

Curve run_slic_sweep(const ExperimentConfig& config) {
  require_algorithm(config, {Algorithm::kSlic}, "sweep-slic");
  return assemble(config, run_sweep_points(config));
}

Curve run_sweep(const ExperimentConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kRlpo:
    case Algorithm::kDpo:
      return run_rlpo_dpo_sweep(config);
    case Algorithm::kIl:
      return run_il_sweep(config);
    case Algorithm::kSlic:
      return run_slic_sweep(config);
  }
  throw ConfigError("algorithm", "unknown algorithm");
}

void write_curve_csv(std::ostream& out, const Curve& curve, const std::string& hash) {
  out << "sweep_value,mean_p_m1,stderr_p_m1,n_seeds,minimizer_exists_rate,config_hash\n";
  for (const auto& r : curve.rows) {
    out << format_real(r.sweep_value) << ',' << format_real(r.mean_p_m1) << ','
        << format_real(r.stderr_p_m1) << ',' << r.n_seeds << ','
        << format_real(r.minimizer_exists_rate) << ',' << hash << '\n';
  }
}

std::string curve_to_csv(const Curve& curve, const std::string& hash) {
  std::ostringstream out;
  write_curve_csv(out, curve, hash);
  return out.str();
}

void write_metadata(std::ostream& out, const ExperimentConfig& config, const Curve& curve) {
  out << resolved_config(config) << "config-hash=" << config_hash(config) << '\n'
      << "sweep=" << curve.sweep_name << '\n'
      << "software-version=" << kVersion << '\n';
}

TheoryReport run_theory_check(const ExperimentConfig& config, std::size_t min_set_size,
                              std::size_t max_set_size) {
  config.validate();
  if (min_set_size < 2) throw ConfigError("min-set-size", "must be at least 2");
  if (max_set_size < min_set_size) {
    throw ConfigError("max-set-size", "must not be below the minimum set size");
  }
  const BasePolicy base = config.base_policy(config.pool_m2);
  const TypeDistribution p_star = config.p_star();
  TheoryReport report;
  for (std::size_t k = min_set_size; k <= max_set_size; ++k) {
    report.predictions.push_back(predict_rlpo_failure(base, p_star, k));
    for (auto d : config.data_grid) {
      EventFrequency ev;
      ev.set_size = k;
      ev.num_data = d;
      ev.trials = config.num_seeds;
      ev.eta = report.predictions.back().condition_holds ? default_eta(base, p_star, k)
                                                         : std::numeric_limits<double>::quiet_NaN();
      report.events.push_back(ev);
    }
  }
  const std::size_t seeds = config.num_seeds;
  std::vector<char> eta_hits(report.events.size() * seeds, 0);
  std::vector<char> il_hits(report.events.size() * seeds, 0);
  parallel_for(report.events.size() * seeds, config.threads, [&](std::size_t task) {
    const auto& ev = report.events[task / seeds];
    const std::uint64_t s = task % seeds;
    const GenerationConfig gen{base, p_star, ev.set_size, ev.num_data};
    Rng rng(derive_seed(config.master_seed, {ev.set_size, ev.num_data, s}));
    const SufficientStats stats = sample_dataset(gen, rng);
    if (!std::isnan(ev.eta)) eta_hits[task] = event_eta_holds(stats, ev.eta) ? 1 : 0;
    il_hits[task] = event_il_holds(stats, config.beta, p_star) ? 1 : 0;
  });
  for (std::size_t e = 0; e < report.events.size(); ++e) {
    auto& ev = report.events[e];
    const auto first = static_cast<std::ptrdiff_t>(e * seeds);
    const auto last = first + static_cast<std::ptrdiff_t>(seeds);
    const auto n = static_cast<double>(seeds);
    ev.il_event_rate = static_cast<double>(std::count(il_hits.begin() + first, il_hits.begin() + last, 1)) / n;
    ev.eta_event_rate =
        std::isnan(ev.eta)
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(std::count(eta_hits.begin() + first, eta_hits.begin() + last, 1)) / n;
  }
  return report;
}

std::string format_theory_report(const TheoryReport& report) {
  std::ostringstream out;
  out << "set_size,threshold,condition_holds,direction\n";
  for (const auto& p : report.predictions) {
    out << p.set_size << ',' << format_real(p.threshold) << ','
        << (p.condition_holds ? "true" : "false") << ',' << to_string(p.direction) << '\n';
  }
  out << '\n' << "set_size,num_data,eta,eta_event_rate,il_event_rate,trials\n";
  auto real_or_na = [](double x) { return std::isnan(x) ? std::string("na") : format_real(x); };
  for (const auto& e : report.events) {
    out << e.set_size << ',' << e.num_data << ',' << real_or_na(e.eta) << ','
        << real_or_na(e.eta_event_rate) << ',' << format_real(e.il_event_rate) << ',' << e.trials
        << '\n';
  }
  return out.str();
}

}  // namespace prefsim
