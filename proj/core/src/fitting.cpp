#include "prefsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prefsim/errors.hpp"

namespace prefsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// ln(1e30): reward and DPO brackets stop where e^{psi2} leaves [1e-30, 1e30].
const double kLogBracketLimit = std::log(1e30);
constexpr double kArgmaxLogOdds = 800.0;

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_count(std::size_t n) noexcept {
  return n == 0 ? kNegInf : std::log(static_cast<double>(n));
}

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// -ln softmax over the slots of one set, where every category-z slot scores s_z.
double record_nll(std::size_t n1, std::size_t n2, Category chosen, double s1, double s2) noexcept {
  const double c = chosen == Category::kOne ? s1 : s2;
  return log_add(log_count(n1) + (s1 - c), log_count(n2) + (s2 - c));
}

// d record_nll / d s2 = w2 - 1{chosen = 2}, with the softmax weight of the M2
// slots computed so that neither branch cancels.
double record_slope(std::size_t n1, std::size_t n2, Category chosen, double s_gap) noexcept {
  if (n1 == 0 || n2 == 0) return 0.0;
  const double x = std::log(static_cast<double>(n2) / static_cast<double>(n1)) + s_gap;
  return chosen == Category::kOne ? sigmoid(x) : -sigmoid(-x);
}

// Slot-by-slot evaluation of the same quantity as record_nll.
double record_nll_slots(const PreferenceDatum& r, double s1, double s2) {
  std::vector<double> logits;
  logits.reserve(r.n1 + r.n2);
  logits.insert(logits.end(), r.n1, s1);
  logits.insert(logits.end(), r.n2, s2);
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - top);
  const double chosen = r.chosen == Category::kOne ? s1 : s2;
  return -(chosen - top - std::log(sum));
}

void check_record(const PreferenceDatum& r) {
  if (r.n1 + r.n2 == 0) throw InvalidArgument("record has an empty set");
  if ((r.chosen == Category::kOne ? r.n1 : r.n2) == 0) {
    throw InvalidArgument("chosen category is absent from the set");
  }
}

void require_beta(double beta, bool allow_zero) {
  if (!std::isfinite(beta) || beta < 0.0 || (!allow_zero && beta == 0.0)) {
    throw InvalidParameter(allow_zero ? "beta must be finite and nonnegative"
                                      : "beta must be finite and positive");
  }
}

void require_pairs(std::size_t set_size) {
  if (set_size != 2) throw UnsupportedFormat("SLiC is defined for choice sets of size 2 only");
}

double hinge(double x) noexcept { return x > 0.0 ? x : 0.0; }

// Per-message log-probabilities ln(q_z / |M_z|) at category log-odds u.
struct MessageScores {
  double s1;
  double s2;
};

MessageScores message_scores(double u, const MessagePool& pool) noexcept {
  const auto m = detail::log_mass_from_log_odds(u);
  return {m.log_q1 - std::log(static_cast<double>(pool.size1())),
          m.log_q2 - std::log(static_cast<double>(pool.size2()))};
}

// d KL / du = q1 q2 (u - u_base).
double kl_slope(double u, const BasePolicy& base) noexcept {
  const auto m = detail::log_mass_from_log_odds(u);
  return std::exp(m.log_q1 + m.log_q2) * (u - base.log_odds());
}

// ---- losses in the log-odds coordinate u = ln(q2 / q1) ----

double dpo_scale(double beta, std::uint64_t num_data) noexcept {
  return num_data == 0 ? 0.0 : beta / static_cast<double>(num_data);
}

MessageScores dpo_scores(double u, const BasePolicy& base, double scale) noexcept {
  const auto m = detail::log_mass_from_log_odds(u);
  return {scale * (m.log_q1 - std::log(base.mass1())),
          scale * (m.log_q2 - std::log(base.mass2()))};
}

double dpo_derivative_u(double u, const SufficientStats& stats, const BasePolicy& base,
                        double beta) {
  const double scale = dpo_scale(beta, stats.num_data());
  const double s_gap = scale * (u - base.log_odds());
  double d = 0.0;
  for (const auto& e : stats.entries()) {
    d += static_cast<double>(e.count) * record_slope(e.n1, e.n2, e.chosen, s_gap);
  }
  return scale * d;
}

double il_derivative_u(double u, const SufficientStats& stats, const BasePolicy& base,
                       double beta) {
  const double s_gap = u - base.pool().log_size_ratio();
  double d = 0.0;
  for (const auto& e : stats.entries()) {
    d += static_cast<double>(e.count) * record_slope(e.n1, e.n2, e.chosen, s_gap);
  }
  return d + beta * kl_slope(u, base);
}

double slic_derivative_u(double u, const SufficientStats& stats, const BasePolicy& base,
                         double beta, double delta) {
  const double gap = u - base.pool().log_size_ratio();
  const auto p = partition_counts(stats);
  double d = 0.0;
  if (gap + delta >= 0.0) d += static_cast<double>(p.size_i1);
  if (delta - gap > 0.0) d -= static_cast<double>(p.size_i2);
  return d + beta * kl_slope(u, base);
}

FitResult<PolicyParams> policy_fit(const StationaryPoint& sp, const MessagePool& pool) {
  FitResult<PolicyParams> out;
  out.converged = sp.converged;
  out.minimizer_exists = sp.exists;
  out.params = sp.exists ? policy_from_log_odds(sp.x, pool) : PolicyParams{};
  return out;
}

}  // namespace

void FitSettings::validate() const {
  if (!std::isfinite(beta) || beta < 0.0) throw InvalidParameter("beta must be nonnegative");
  if (!std::isfinite(delta) || delta <= 0.0) throw InvalidParameter("delta must be positive");
  if (!std::isfinite(tol) || tol <= 0.0) throw InvalidParameter("tol must be positive");
  if (max_iter < 1) throw InvalidParameter("max_iter must be positive");
}

double reward_loss(const RewardParams& psi, const SufficientStats& stats) {
  double loss = 0.0;
  for (const auto& e : stats.entries()) {
    loss += static_cast<double>(e.count) * record_nll(e.n1, e.n2, e.chosen, psi.psi1, psi.psi2);
  }
  return loss;
}

double reward_loss(const RewardParams& psi, std::span<const PreferenceDatum> records) {
  double loss = 0.0;
  for (const auto& r : records) {
    check_record(r);
    loss += record_nll_slots(r, psi.psi1, psi.psi2);
  }
  return loss;
}

double reward_loss_derivative(const RewardParams& psi, const SufficientStats& stats) {
  double d = 0.0;
  for (const auto& e : stats.entries()) {
    d += static_cast<double>(e.count) * record_slope(e.n1, e.n2, e.chosen, psi.gap());
  }
  return d;
}

double policy_loss(const PolicyParams& theta, const RewardParams& reward, const BasePolicy& base,
                   std::uint64_t num_data, double beta) {
  require_beta(beta, true);
  const double u = category_log_odds(theta, base.pool());
  const auto m = detail::log_mass_from_log_odds(u);
  const double expected = m.q1 * reward.psi1 + m.q2 * reward.psi2;
  const double kl = beta == 0.0 ? 0.0 : beta * detail::kl_from_log_odds(u, base.mass1());
  return -static_cast<double>(num_data) * expected + kl;
}

double policy_loss_derivative(const PolicyParams& theta, const RewardParams& reward,
                              const BasePolicy& base, std::uint64_t num_data, double beta) {
  require_beta(beta, true);
  const double u = category_log_odds(theta, base.pool());
  const auto m = detail::log_mass_from_log_odds(u);
  const double q1q2 = std::exp(m.log_q1 + m.log_q2);
  return -static_cast<double>(num_data) * reward.gap() * q1q2 + beta * kl_slope(u, base);
}

double dpo_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
                double beta) {
  require_beta(beta, false);
  const double u = category_log_odds(theta, base.pool());
  const auto s = dpo_scores(u, base, dpo_scale(beta, stats.num_data()));
  double loss = 0.0;
  for (const auto& e : stats.entries()) {
    loss += static_cast<double>(e.count) * record_nll(e.n1, e.n2, e.chosen, s.s1, s.s2);
  }
  return loss;
}

double dpo_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
                const BasePolicy& base, double beta) {
  require_beta(beta, false);
  const double u = category_log_odds(theta, base.pool());
  const auto s = dpo_scores(u, base, dpo_scale(beta, records.size()));
  double loss = 0.0;
  for (const auto& r : records) {
    check_record(r);
    loss += record_nll_slots(r, s.s1, s.s2);
  }
  return loss;
}

double dpo_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                           const BasePolicy& base, double beta) {
  require_beta(beta, false);
  return dpo_derivative_u(category_log_odds(theta, base.pool()), stats, base, beta);
}

double il_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
               double beta) {
  require_beta(beta, true);
  const double u = category_log_odds(theta, base.pool());
  const auto s = message_scores(u, base.pool());
  double loss = 0.0;
  for (const auto& e : stats.entries()) {
    loss += static_cast<double>(e.count) * record_nll(e.n1, e.n2, e.chosen, s.s1, s.s2);
  }
  if (beta > 0.0) loss += beta * detail::kl_from_log_odds(u, base.mass1());
  return loss;
}

double il_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
               const BasePolicy& base, double beta) {
  require_beta(beta, true);
  const double u = category_log_odds(theta, base.pool());
  const auto s = message_scores(u, base.pool());
  double loss = 0.0;
  for (const auto& r : records) {
    check_record(r);
    loss += record_nll_slots(r, s.s1, s.s2);
  }
  if (beta > 0.0) loss += beta * kl_to_base(theta, base);
  return loss;
}

double il_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                          const BasePolicy& base, double beta) {
  require_beta(beta, true);
  return il_derivative_u(category_log_odds(theta, base.pool()), stats, base, beta);
}

double slic_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
                 double beta, double delta) {
  require_pairs(stats.set_size());
  require_beta(beta, true);
  if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
  const double u = category_log_odds(theta, base.pool());
  const auto s = message_scores(u, base.pool());
  double loss = 0.0;
  for (const auto& e : stats.entries()) {
    double term = delta;
    if (e.n1 == 1) {
      term = e.chosen == Category::kOne ? hinge(s.s2 - s.s1 + delta) : hinge(s.s1 - s.s2 + delta);
    }
    loss += static_cast<double>(e.count) * term;
  }
  if (beta > 0.0) loss += beta * detail::kl_from_log_odds(u, base.mass1());
  return loss;
}

double slic_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
                 const BasePolicy& base, double beta, double delta) {
  require_beta(beta, true);
  if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
  const double u = category_log_odds(theta, base.pool());
  const auto s = message_scores(u, base.pool());
  double loss = 0.0;
  for (const auto& r : records) {
    require_pairs(r.n1 + r.n2);
    check_record(r);
    // Slot 0 holds the first member in category order; the chosen slot is the
    // first member of the chosen category and the other slot is rejected.
    const Category slots[2] = {r.n1 > 0 ? Category::kOne : Category::kTwo,
                               r.n1 > 1 ? Category::kOne : Category::kTwo};
    const std::size_t chosen_slot = slots[0] == r.chosen ? 0 : 1;
    const Category rejected = slots[1 - chosen_slot];
    const double s_chosen = r.chosen == Category::kOne ? s.s1 : s.s2;
    const double s_rejected = rejected == Category::kOne ? s.s1 : s.s2;
    loss += hinge(s_rejected - s_chosen + delta);
  }
  if (beta > 0.0) loss += beta * kl_to_base(theta, base);
  return loss;
}

double slic_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                            const BasePolicy& base, double beta, double delta) {
  require_pairs(stats.set_size());
  require_beta(beta, true);
  return slic_derivative_u(category_log_odds(theta, base.pool()), stats, base, beta, delta);
}

PolicyParams optimal_policy(const RewardParams& reward, const BasePolicy& base,
                            std::uint64_t num_data, double beta) {
  require_beta(beta, true);
  if (!std::isfinite(reward.psi1) || !std::isfinite(reward.psi2)) {
    throw InvalidParameter("reward parameters must be finite");
  }
  const double gap = reward.gap();
  double u = base.log_odds();
  if (beta == 0.0) {
    if (gap > 0.0) u = kArgmaxLogOdds;
    if (gap < 0.0) u = -kArgmaxLogOdds;
  } else {
    u += gap * (static_cast<double>(num_data) / beta);
  }
  if (!std::isfinite(u)) throw NumericError("optimal policy log-odds overflowed");
  return policy_from_log_odds(u, base.pool());
}

FitResult<RewardParams> fit_reward(const SufficientStats& stats, const FitSettings& settings) {
  settings.validate();
  FitResult<RewardParams> out;
  if (partition_counts(stats).size_i == 0) {
    // No mixed set: the loss is constant.
    out.converged = true;
    out.minimizer_exists = true;
  } else {
    const auto sp = bisect_derivative(
        [&](double x) { return reward_loss_derivative({0.0, x}, stats); },
        {-1.0, 1.0, -kLogBracketLimit, kLogBracketLimit}, settings.solver());
    out.converged = sp.converged;
    out.minimizer_exists = sp.exists;
    if (sp.exists) out.params = {0.0, sp.x};
  }
  out.loss_value = reward_loss(out.params, stats);
  return out;
}

FitResult<PolicyParams> fit_rlpo(const SufficientStats& stats, const BasePolicy& base,
                                 const FitSettings& settings) {
  require_beta(settings.beta, false);
  const auto reward = fit_reward(stats, settings);
  FitResult<PolicyParams> out;
  out.params = optimal_policy(reward.params, base, stats.num_data(), settings.beta);
  out.loss_value = policy_loss(out.params, reward.params, base, stats.num_data(), settings.beta);
  out.converged = reward.converged;
  out.minimizer_exists = reward.minimizer_exists;
  return out;
}

FitResult<PolicyParams> fit_dpo(const SufficientStats& stats, const BasePolicy& base,
                                const FitSettings& settings) {
  settings.validate();
  require_beta(settings.beta, false);
  FitResult<PolicyParams> out;
  if (partition_counts(stats).size_i == 0) {
    // Constant loss; report the base policy, which is what RLPO returns here.
    out.params = base_policy_params(base);
    out.converged = true;
    out.minimizer_exists = true;
  } else {
    const double ub = base.log_odds();
    const double scale = static_cast<double>(stats.num_data()) / settings.beta;
    if (!std::isfinite(scale)) throw NumericError("dpo scale |D|/beta overflowed");
    const auto sp = bisect_derivative(
        [&](double u) { return dpo_derivative_u(u, stats, base, settings.beta); },
        {ub - scale, ub + scale, ub - kLogBracketLimit * scale, ub + kLogBracketLimit * scale},
        settings.solver());
    out = policy_fit(sp, base.pool());
  }
  out.loss_value = dpo_loss(out.params, stats, base, settings.beta);
  return out;
}

FitResult<PolicyParams> fit_il(const SufficientStats& stats, const BasePolicy& base,
                               const FitSettings& settings) {
  settings.validate();
  FitResult<PolicyParams> out;
  const auto parts = partition_counts(stats);
  if (settings.beta == 0.0 && parts.size_i == 0) {
    out.params = base_policy_params(base);
    out.converged = true;
    out.minimizer_exists = true;
  } else if (settings.beta == 0.0 && (parts.size_i1 == 0 || parts.size_i2 == 0)) {
    out.converged = true;
  } else {
    const double ub = base.log_odds();
    const double l = base.pool().log_size_ratio();
    const auto sp = bisect_derivative(
        [&](double u) { return il_derivative_u(u, stats, base, settings.beta); },
        {std::min(ub, l) - 1.0, std::max(ub, l) + 1.0, -kMaxBracket, kMaxBracket},
        settings.solver());
    out = policy_fit(sp, base.pool());
  }
  out.loss_value = il_loss(out.params, stats, base, settings.beta);
  return out;
}

FitResult<PolicyParams> fit_slic(const SufficientStats& stats, const BasePolicy& base,
                                 const FitSettings& settings) {
  require_pairs(stats.set_size());
  settings.validate();
  require_beta(settings.beta, false);
  const double ub = base.log_odds();
  const double l = base.pool().log_size_ratio();
  const double delta = settings.delta;
  const auto sp = bisect_derivative(
      [&](double u) { return slic_derivative_u(u, stats, base, settings.beta, delta); },
      {std::min(ub, l - delta) - 1.0, std::max(ub, l + delta) + 1.0, -kMaxBracket, kMaxBracket},
      settings.solver());
  auto out = policy_fit(sp, base.pool());
  out.loss_value = slic_loss(out.params, stats, base, settings.beta, delta);
  return out;
}

}  // namespace prefsim
