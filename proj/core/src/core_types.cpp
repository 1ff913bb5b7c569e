#include "prefsim/core_types.hpp"

#include <cmath>
#include <string>

#include "prefsim/errors.hpp"

namespace prefsim {

MessagePool::MessagePool(std::uint64_t size1, std::uint64_t size2)
    : size1_(size1), size2_(size2) {
  if (size1 == 0 || size2 == 0) {
    throw InvalidParameter("message pool categories must be nonempty (got |M1|=" +
                           std::to_string(size1) + ", |M2|=" + std::to_string(size2) +
                           ")");
  }
}

double MessagePool::log_size_ratio() const noexcept {
  return std::log(static_cast<double>(size2_)) - std::log(static_cast<double>(size1_));
}

BasePolicy::BasePolicy(double mass1, MessagePool pool) : mass1_(mass1), pool_(pool) {
  if (!(mass1 > 0.0 && mass1 < 1.0)) {
    throw InvalidParameter("base policy mass on M1 must lie in (0, 1), got " +
                           std::to_string(mass1));
  }
}

double BasePolicy::per_message(Category c) const noexcept {
  return mass(c) / static_cast<double>(pool_.size(c));
}

double BasePolicy::log_odds() const noexcept {
  return std::log(mass2()) - std::log(mass1_);
}

TypeDistribution::TypeDistribution(double p1) : p1_(p1) {
  if (!(p1 > 0.0 && p1 < 1.0)) {
    throw InvalidParameter("type probability p*(1) must lie in (0, 1), got " +
                           std::to_string(p1));
  }
}

namespace detail {

double softplus(double x) noexcept {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

LogMass log_mass_from_log_odds(double u) noexcept {
  LogMass m{};
  m.log_q1 = -softplus(u);
  m.log_q2 = -softplus(-u);
  m.q1 = std::exp(m.log_q1);
  m.q2 = std::exp(m.log_q2);
  return m;
}

double kl_from_log_odds(double u, double base_mass1) noexcept {
  const LogMass m = log_mass_from_log_odds(u);
  const double log_b1 = std::log(base_mass1);
  const double log_b2 = std::log1p(-base_mass1);
  double kl = 0.0;
  if (m.q1 > 0.0) kl += m.q1 * (m.log_q1 - log_b1);
  if (m.q2 > 0.0) kl += m.q2 * (m.log_q2 - log_b2);
  return kl < 0.0 ? 0.0 : kl;
}

}  // namespace detail

namespace {

void require_finite(const PolicyParams& theta) {
  if (!std::isfinite(theta.theta1) || !std::isfinite(theta.theta2)) {
    throw InvalidParameter("policy parameters must be finite");
  }
}

}  // namespace

double category_log_odds(const PolicyParams& theta, const MessagePool& pool) {
  require_finite(theta);
  return theta.gap() + pool.log_size_ratio();
}

CategoryMass category_mass(const PolicyParams& theta, const MessagePool& pool) {
  const double u = category_log_odds(theta, pool);
  const double q1 = std::exp(-detail::softplus(u));
  return {q1, 1.0 - q1};
}

PolicyParams policy_from_log_odds(double log_odds, const MessagePool& pool) {
  return {0.0, log_odds - pool.log_size_ratio()};
}

PolicyParams base_policy_params(const BasePolicy& base) {
  return policy_from_log_odds(base.log_odds(), base.pool());
}

double per_message_probability(const PolicyParams& theta, const MessagePool& pool,
                               Category c) {
  const auto m = detail::log_mass_from_log_odds(category_log_odds(theta, pool));
  const double log_q = c == Category::kOne ? m.log_q1 : m.log_q2;
  return std::exp(log_q - std::log(static_cast<double>(pool.size(c))));
}

double kl_to_base(const PolicyParams& theta, const BasePolicy& base) {
  const double u = category_log_odds(theta, base.pool());
  return detail::kl_from_log_odds(u, base.mass1());
}

}  // namespace prefsim
