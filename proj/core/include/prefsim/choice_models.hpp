#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prefsim/core_types.hpp"
#include "prefsim/random.hpp"

namespace prefsim {

/// One alternative in a choice set. `copy` distinguishes repeated draws of the
/// same message when a category's pool is smaller than the number of slots.
struct Member {
  Category category = Category::kOne;
  std::uint64_t id = 0;
  std::uint32_t copy = 0;

  friend bool operator==(const Member&, const Member&) = default;
};

/// An ordered set of alternatives. Members are distinct; categories may repeat.
class ChoiceSet {
 public:
  explicit ChoiceSet(std::vector<Member> members);

  // Members 0..n1-1 of category 1 followed by 0..n2-1 of category 2.
  static ChoiceSet from_counts(std::size_t n1, std::size_t n2);

  std::span<const Member> members() const noexcept { return members_; }
  const Member& operator[](std::size_t i) const { return members_[i]; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return members_.size() - n1_; }
  std::size_t count(Category c) const noexcept { return c == Category::kOne ? n1() : n2(); }

  std::optional<std::size_t> find(const Member& m) const noexcept;

 private:
  std::vector<Member> members_;
  std::size_t n1_ = 0;
};

/// Choice probabilities over the members of a set, in member order.
class ChoiceDistribution {
 public:
  explicit ChoiceDistribution(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// Finite-type choice model (Z, p, r). Rewards are looked up per (member, type).
class FiniteChoiceModel {
 public:
  using RewardFn = std::function<double(const Member&, std::size_t type)>;

  FiniteChoiceModel(std::vector<double> weights, RewardFn reward);

  std::size_t num_types() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double reward(const Member& m, std::size_t type) const;

 private:
  std::vector<double> weights_;
  RewardFn reward_;
};

/// Two-type model where type z gets reward 1 from category-z messages, 0 otherwise.
FiniteChoiceModel dichotomy_model(const TypeDistribution& p_star);

/// Individuals pick uniformly from the argmax of their type's rewards.
ChoiceDistribution hard_choice_probs(const FiniteChoiceModel& model, const ChoiceSet& set);

/// Per-type softmax mixed over the type distribution.
ChoiceDistribution soft_choice_probs(const FiniteChoiceModel& model, const ChoiceSet& set);

/// Softmax of base rewards, one per member of `set`.
ChoiceDistribution logit_choice_probs(std::span<const double> base_rewards,
                                      const ChoiceSet& set);

/// Each type chooses uniformly among members of its own category. When that
/// category is absent every member ties at reward 0 and the choice is uniform
/// over the whole set, which is what hard_choice_probs gives for the same model.
ChoiceDistribution dichotomy_choice_probs(const TypeDistribution& p_star,
                                          const ChoiceSet& set);

/// Inverse-CDF draw of a member index.
std::size_t sample_choice(const ChoiceDistribution& distribution, Rng& rng);

/// Draws one choice from the soft model through its hard-choice representation:
/// sample a type, perturb every member's reward with independent standard
/// Gumbel noise and take the argmax.
std::size_t sample_soft_choice_gumbel(const FiniteChoiceModel& model, const ChoiceSet& set,
                                      Rng& rng);

using ChoiceProbsFn = std::function<ChoiceDistribution(const ChoiceSet&)>;

/// |ln[(P(x|A)/P(x'|A)) / (P(x|B)/P(x'|B))]|. Zero exactly when the
/// independence-of-irrelevant-alternatives ratio identity holds for this pair.
/// Throws InvalidArgument when x or x' is missing from a set and
/// UndefinedRatio when any of the four probabilities is zero.
double iia_deviation(const ChoiceProbsFn& probs, const Member& x, const Member& x_prime,
                     const ChoiceSet& set_a, const ChoiceSet& set_b);

}  // namespace prefsim
