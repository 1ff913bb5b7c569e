#include "prefsim/choice_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prefsim/errors.hpp"

namespace prefsim {

ChoiceSet::ChoiceSet(std::vector<Member> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("choice set must be nonempty");
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (members_[i] == members_[j]) {
        throw InvalidArgument("choice set members must be distinct");
      }
    }
    if (members_[i].category == Category::kOne) ++n1_;
  }
}

ChoiceSet ChoiceSet::from_counts(std::size_t n1, std::size_t n2) {
  std::vector<Member> members;
  members.reserve(n1 + n2);
  for (std::size_t i = 0; i < n1; ++i) members.push_back({Category::kOne, i, 0});
  for (std::size_t i = 0; i < n2; ++i) members.push_back({Category::kTwo, i, 0});
  return ChoiceSet(std::move(members));
}

std::optional<std::size_t> ChoiceSet::find(const Member& m) const noexcept {
  const auto it = std::find(members_.begin(), members_.end(), m);
  if (it == members_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

ChoiceDistribution::ChoiceDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("choice distribution must be nonempty");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidParameter("choice probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw InvalidParameter("choice probabilities must sum to 1 (got " +
                           std::to_string(total) + ")");
  }
}

FiniteChoiceModel::FiniteChoiceModel(std::vector<double> weights, RewardFn reward)
    : weights_(std::move(weights)), reward_(std::move(reward)) {
  if (weights_.empty()) throw InvalidArgument("choice model needs at least one type");
  if (!reward_) throw InvalidArgument("choice model needs a reward function");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidParameter("type weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidParameter("type weights must sum to 1");
  }
}

double FiniteChoiceModel::reward(const Member& m, std::size_t type) const {
  const double r = reward_(m, type);
  if (!std::isfinite(r)) throw InvalidParameter("rewards must be finite");
  return r;
}

FiniteChoiceModel dichotomy_model(const TypeDistribution& p_star) {
  return FiniteChoiceModel({p_star.p1(), p_star.p2()}, [](const Member& m, std::size_t type) {
    return index_of(m.category) == static_cast<int>(type) ? 1.0 : 0.0;
  });
}

ChoiceDistribution hard_choice_probs(const FiniteChoiceModel& model, const ChoiceSet& set) {
  std::vector<double> probs(set.size(), 0.0);
  std::vector<double> rewards(set.size());
  for (std::size_t z = 0; z < model.num_types(); ++z) {
    const double w = model.weights()[z];
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < set.size(); ++i) rewards[i] = model.reward(set[i], z);
    const double best = *std::max_element(rewards.begin(), rewards.end());
    // Ties use exact equality: reward tables are user constants.
    const auto ties = static_cast<double>(std::count(rewards.begin(), rewards.end(), best));
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (rewards[i] == best) probs[i] += w / ties;
    }
  }
  return ChoiceDistribution(std::move(probs));
}

namespace {

void add_softmax(std::span<const double> logits, double weight, std::vector<double>& out) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - top);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] += weight * std::exp(logits[i] - top) / total;
  }
}

}  // namespace

ChoiceDistribution soft_choice_probs(const FiniteChoiceModel& model, const ChoiceSet& set) {
  std::vector<double> probs(set.size(), 0.0);
  std::vector<double> rewards(set.size());
  for (std::size_t z = 0; z < model.num_types(); ++z) {
    for (std::size_t i = 0; i < set.size(); ++i) rewards[i] = model.reward(set[i], z);
    add_softmax(rewards, model.weights()[z], probs);
  }
  return ChoiceDistribution(std::move(probs));
}

ChoiceDistribution logit_choice_probs(std::span<const double> base_rewards,
                                      const ChoiceSet& set) {
  if (base_rewards.size() != set.size()) {
    throw InvalidArgument("logit model needs one base reward per member");
  }
  for (double r : base_rewards) {
    if (!std::isfinite(r)) throw InvalidParameter("base rewards must be finite");
  }
  std::vector<double> probs(set.size(), 0.0);
  add_softmax(base_rewards, 1.0, probs);
  return ChoiceDistribution(std::move(probs));
}

ChoiceDistribution dichotomy_choice_probs(const TypeDistribution& p_star,
                                          const ChoiceSet& set) {
  std::vector<double> probs(set.size(), 0.0);
  for (Category z : {Category::kOne, Category::kTwo}) {
    const double w = p_star.p(z);
    const std::size_t present = set.count(z);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (present == 0) {
        probs[i] += w / static_cast<double>(set.size());
      } else if (set[i].category == z) {
        probs[i] += w / static_cast<double>(present);
      }
    }
  }
  return ChoiceDistribution(std::move(probs));
}

std::size_t sample_choice(const ChoiceDistribution& distribution, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    const double p = distribution[i];
    if (p <= 0.0) continue;
    last_positive = i;
    cumulative += p;
    if (u < cumulative) return i;
  }
  // Rounding left cumulative a hair below 1.
  return last_positive;
}

std::size_t sample_soft_choice_gumbel(const FiniteChoiceModel& model, const ChoiceSet& set,
                                      Rng& rng) {
  const double u = rng.uniform();
  std::size_t type = model.num_types() - 1;
  double cumulative = 0.0;
  for (std::size_t z = 0; z < model.num_types(); ++z) {
    cumulative += model.weights()[z];
    if (u < cumulative) {
      type = z;
      break;
    }
  }
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double v = model.reward(set[i], type) + rng.gumbel();
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

double iia_deviation(const ChoiceProbsFn& probs, const Member& x, const Member& x_prime,
                     const ChoiceSet& set_a, const ChoiceSet& set_b) {
  const auto ia = set_a.find(x);
  const auto ia_prime = set_a.find(x_prime);
  const auto ib = set_b.find(x);
  const auto ib_prime = set_b.find(x_prime);
  if (!ia || !ia_prime || !ib || !ib_prime) {
    throw InvalidArgument("both messages must belong to both choice sets");
  }
  const ChoiceDistribution pa = probs(set_a);
  const ChoiceDistribution pb = probs(set_b);
  const double terms[] = {pa[*ia], pa[*ia_prime], pb[*ib], pb[*ib_prime]};
  for (double t : terms) {
    if (!(t > 0.0)) throw UndefinedRatio("IIA ratio involves a zero choice probability");
  }
  const double log_ratio_a = std::log(terms[0]) - std::log(terms[1]);
  const double log_ratio_b = std::log(terms[2]) - std::log(terms[3]);
  return std::abs(log_ratio_a - log_ratio_b);
}

}  // namespace prefsim
