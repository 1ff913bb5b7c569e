#include "prefsim/theory.hpp"

#include <algorithm>
#include <cmath>

#include "prefsim/errors.hpp"

namespace prefsim {

namespace {

constexpr std::size_t kPolynomialMaxK = 128;
constexpr double kBoundaryTol = 1e-12;

void require_set_size(std::size_t k) {
  if (k < 2) throw InvalidParameter("set size must be at least 2");
}

}  // namespace

double f_threshold(double zeta, std::size_t k) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("F is defined for 0 < zeta < 1");
  require_set_size(k);
  if (k <= kPolynomialMaxK) {
    // Both terms carry a factor zeta (1 - zeta), divided out:
    //   numerator   sum_{j=0}^{k-2} zeta^j
    //   denominator sum_{n=1}^{k-1} C(k,n) zeta^{n-1} (1-zeta)^{k-1-n}
    const double w = 1.0 - zeta;
    double num = 0.0;
    double power = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      num += power;
      power *= zeta;
    }
    double den = 0.0;
    double binom = static_cast<double>(k);  // C(k, 1)
    for (std::size_t n = 1; n < k; ++n) {
      den += binom * std::pow(zeta, static_cast<double>(n - 1)) *
             std::pow(w, static_cast<double>(k - 1 - n));
      binom = binom * static_cast<double>(k - n) / static_cast<double>(n + 1);
    }
    return num / den;
  }
  const auto kd = static_cast<double>(k);
  const double log_zeta = std::log(zeta);
  const double num = -zeta * std::expm1((kd - 1.0) * log_zeta);
  const double den = -std::expm1(kd * log_zeta) - std::exp(kd * std::log1p(-zeta));
  return num / den;
}

std::string to_string(FailureDirection direction) {
  switch (direction) {
    case FailureDirection::kCollapseToM2:
      return "collapse_to_M2";
    case FailureDirection::kPreferM1:
      return "prefer_M1";
    case FailureDirection::kBoundary:
      return "boundary";
  }
  return "unknown";
}

FailurePrediction predict_rlpo_failure(const BasePolicy& base, const TypeDistribution& p_star,
                                       std::size_t set_size) {
  FailurePrediction out;
  out.set_size = set_size;
  out.threshold = f_threshold(base.mass1(), set_size);
  const double p1 = p_star.p1();
  if (std::abs(p1 - out.threshold) <= kBoundaryTol) {
    out.direction = FailureDirection::kBoundary;
  } else if (p1 < out.threshold) {
    out.condition_holds = true;
    out.direction = FailureDirection::kCollapseToM2;
  }
  return out;
}

double both_categories_rate(const BasePolicy& base, std::size_t set_size) {
  require_set_size(set_size);
  const auto k = static_cast<double>(set_size);
  return 1.0 - std::pow(base.mass1(), k) - std::pow(base.mass2(), k);
}

double default_eta(const BasePolicy& base, const TypeDistribution& p_star, std::size_t set_size) {
  const auto prediction = predict_rlpo_failure(base, p_star, set_size);
  if (!prediction.condition_holds) {
    throw DomainError("eta is positive only when p*(1) < F(base mass of M1)");
  }
  const double s = both_categories_rate(base, set_size);
  return s * s * (prediction.threshold - p_star.p1()) / 4.0;
}

bool event_eta_holds(const SufficientStats& stats, double eta) {
  if (!(eta > 0.0)) throw InvalidParameter("eta must be positive");
  const auto rho = rho_stats(stats);
  return rho.rho_data - rho.rho_chosen > eta && rho.rho_chosen > 0.0;
}

bool event_il_holds(const SufficientStats& stats, double beta, const TypeDistribution& p_star) {
  if (!std::isfinite(beta) || beta < 0.0) throw InvalidParameter("beta must be nonnegative");
  const auto parts = partition_counts(stats);
  const double bound = std::max(1.0 + beta, 2.0 * beta * std::log(p_star.p2() / p_star.p1()));
  return parts.size_i1 > 1 && static_cast<double>(parts.size_i2) > bound;
}

AsymptoticMass il_asymptotic_mass(const TypeDistribution& p_star, const MessagePool& pool) {
  const std::string regime = "asymptotic: pairwise sets, |D| -> infinity, beta -> 0";
  const double w1 = p_star.p1() * static_cast<double>(pool.size1());
  const double w2 = p_star.p2() * static_cast<double>(pool.size2());
  return {w1 / (w1 + w2), regime};
}

}  // namespace prefsim
