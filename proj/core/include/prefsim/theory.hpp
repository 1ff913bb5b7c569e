#pragma once

#include <cstddef>
#include <string>

#include "prefsim/core_types.hpp"
#include "prefsim/data_gen.hpp"

namespace prefsim {

/// F(zeta) = (zeta - zeta^k) / (1 - zeta^k - (1 - zeta)^k), the mean fraction
/// of M1 members in a size-k set drawn with M1 probability zeta, given that
/// both categories are present. Throws DomainError unless 0 < zeta < 1 and
/// InvalidParameter if k < 2.
double f_threshold(double zeta, std::size_t k);

enum class FailureDirection { kCollapseToM2, kPreferM1, kBoundary };

std::string to_string(FailureDirection direction);

struct FailurePrediction {
  double threshold = 0.0;  // F(base mass of M1)
  bool condition_holds = false;  // p*(1) < threshold, strictly
  std::size_t set_size = 0;
  FailureDirection direction = FailureDirection::kPreferM1;
};

/// Whether reward learning (and DPO) drives the policy onto M2 as data grows.
/// Within 1e-12 of the threshold the direction is kBoundary and the condition
/// does not hold.
FailurePrediction predict_rlpo_failure(const BasePolicy& base, const TypeDistribution& p_star,
                                       std::size_t set_size);

/// Probability that a sampled set contains both categories: 1 - m^k - (1-m)^k.
double both_categories_rate(const BasePolicy& base, std::size_t set_size);

/// eta = s^2 (F - p*(1)) / 4 with s = both_categories_rate. Throws DomainError
/// when the failure condition does not hold strictly (eta would not be positive).
double default_eta(const BasePolicy& base, const TypeDistribution& p_star, std::size_t set_size);

/// rho_data - rho_chosen > eta and rho_chosen > 0.
bool event_eta_holds(const SufficientStats& stats, double eta);

/// |I1| > 1 and |I2| > max(1 + beta, 2 beta ln(p*(2) / p*(1))).
bool event_il_holds(const SufficientStats& stats, double beta, const TypeDistribution& p_star);

struct AsymptoticMass {
  double mass1;
  std::string regime;
};

/// Limit of the inclusive-learning M1 mass for pairwise data as |D| grows and
/// beta shrinks: r |M1| / (r |M1| + |M2|) with r = p*(1) / p*(2).
AsymptoticMass il_asymptotic_mass(const TypeDistribution& p_star, const MessagePool& pool);

}  // namespace prefsim
