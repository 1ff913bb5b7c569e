#pragma once

#include <cstdint>

namespace prefsim {

/// Message category. Category 1 is M1, category 2 is M2; the two sets
/// partition the message pool.
enum class Category : std::uint8_t { kOne = 1, kTwo = 2 };

constexpr Category other(Category c) noexcept {
  return c == Category::kOne ? Category::kTwo : Category::kOne;
}

constexpr int index_of(Category c) noexcept { return c == Category::kOne ? 0 : 1; }

/// Sizes of the two message categories. Messages are never materialized; they
/// are identified by (category, index) with index < size of that category.
class MessagePool {
 public:
  MessagePool(std::uint64_t size1, std::uint64_t size2);

  std::uint64_t size1() const noexcept { return size1_; }
  std::uint64_t size2() const noexcept { return size2_; }
  std::uint64_t size(Category c) const noexcept {
    return c == Category::kOne ? size1_ : size2_;
  }
  // ln(|M2| / |M1|)
  double log_size_ratio() const noexcept;

 private:
  std::uint64_t size1_;
  std::uint64_t size2_;
};

/// Base (reference) policy that is uniform within each category.
class BasePolicy {
 public:
  BasePolicy(double mass1, MessagePool pool);

  double mass1() const noexcept { return mass1_; }
  double mass2() const noexcept { return 1.0 - mass1_; }
  double mass(Category c) const noexcept {
    return c == Category::kOne ? mass1() : mass2();
  }
  const MessagePool& pool() const noexcept { return pool_; }

  double per_message(Category c) const noexcept;
  // ln(P(M2) / P(M1)); the category log-odds of the base policy.
  double log_odds() const noexcept;

 private:
  double mass1_;
  MessagePool pool_;
};

/// Population type distribution p*; p2 = 1 - p1.
class TypeDistribution {
 public:
  explicit TypeDistribution(double p1);

  double p1() const noexcept { return p1_; }
  double p2() const noexcept { return 1.0 - p1_; }
  double p(Category c) const noexcept { return c == Category::kOne ? p1() : p2(); }

 private:
  double p1_;
};

/// Category-constant reward model: every message in M_z gets reward psi_z.
struct RewardParams {
  double psi1 = 0.0;
  double psi2 = 0.0;

  double gap() const noexcept { return psi2 - psi1; }
  RewardParams canonical() const noexcept { return {0.0, psi2 - psi1}; }
  double operator[](Category c) const noexcept {
    return c == Category::kOne ? psi1 : psi2;
  }
};

/// Category-softmax policy: P(x) = e^{theta_z} / (|M1| e^{theta1} + |M2| e^{theta2}).
struct PolicyParams {
  double theta1 = 0.0;
  double theta2 = 0.0;

  double gap() const noexcept { return theta2 - theta1; }
  PolicyParams canonical() const noexcept { return {0.0, theta2 - theta1}; }
};

struct CategoryMass {
  double q1;
  double q2;
};

/// Total probability the policy puts on each category; q2 is computed as 1 - q1.
/// Throws InvalidParameter for non-finite theta.
CategoryMass category_mass(const PolicyParams& theta, const MessagePool& pool);

/// ln(q2 / q1) for the policy, the coordinate all policy fits solve in.
double category_log_odds(const PolicyParams& theta, const MessagePool& pool);

/// Gauge-fixed parameters (theta1 = 0) whose category log-odds equal `log_odds`.
PolicyParams policy_from_log_odds(double log_odds, const MessagePool& pool);

/// Parameters that reproduce the base policy exactly.
PolicyParams base_policy_params(const BasePolicy& base);

/// Per-message probability of a category-`c` message under theta.
double per_message_probability(const PolicyParams& theta, const MessagePool& pool,
                               Category c);

/// KL(P_theta || P_base). Both distributions are uniform within categories over
/// the same pool, so the divergence reduces to the two category masses.
double kl_to_base(const PolicyParams& theta, const BasePolicy& base);

namespace detail {

// ln(1 + e^x) without overflow.
double softplus(double x) noexcept;

// Category log masses (ln q1, ln q2) for log-odds u = ln(q2/q1).
struct LogMass {
  double log_q1;
  double log_q2;
  double q1;
  double q2;
};
LogMass log_mass_from_log_odds(double u) noexcept;

// KL between the category masses implied by log-odds u and the base masses;
// accurate in the tails where q1 or q2 underflows.
double kl_from_log_odds(double u, double base_mass1) noexcept;

}  // namespace detail

}  // namespace prefsim
