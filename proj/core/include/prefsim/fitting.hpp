#pragma once

#include <cstdint>
#include <span>

#include "prefsim/core_types.hpp"
#include "prefsim/data_gen.hpp"
#include "prefsim/scalar_minimize.hpp"

namespace prefsim {

struct FitSettings {
  double beta = 1.0;   // KL weight
  double delta = 1.0;  // SLiC margin
  double tol = 1e-10;
  int max_iter = 500;

  // Throws InvalidParameter on beta < 0, delta <= 0, tol <= 0 or max_iter < 1.
  void validate() const;
  SolverTolerance solver() const noexcept { return {tol, max_iter}; }
};

/// `converged` means the solver bracket shrank to `tol * max(1, |x|)` in the
/// gauge-fixed coordinate. When `minimizer_exists` is false, `params` holds the
/// fallback: zero reward, the base policy for RLPO, zero policy parameters
/// otherwise.
template <class Params>
struct FitResult {
  Params params{};
  double loss_value = 0.0;
  bool converged = false;
  bool minimizer_exists = false;
};

// Losses. Each has a count-based form and a record form that walks every slot
// of every set; the two agree up to rounding. Derivatives are taken with
// respect to the second coordinate (psi2 or theta2) with the first held fixed.

double reward_loss(const RewardParams& psi, const SufficientStats& stats);
double reward_loss(const RewardParams& psi, std::span<const PreferenceDatum> records);
double reward_loss_derivative(const RewardParams& psi, const SufficientStats& stats);

double policy_loss(const PolicyParams& theta, const RewardParams& reward, const BasePolicy& base,
                   std::uint64_t num_data, double beta);
double policy_loss_derivative(const PolicyParams& theta, const RewardParams& reward,
                              const BasePolicy& base, std::uint64_t num_data, double beta);

double dpo_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
                double beta);
double dpo_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
                const BasePolicy& base, double beta);
double dpo_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                           const BasePolicy& base, double beta);

double il_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
               double beta);
double il_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
               const BasePolicy& base, double beta);
double il_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                          const BasePolicy& base, double beta);

// SLiC is defined for pairs only; other set sizes throw UnsupportedFormat.
double slic_loss(const PolicyParams& theta, const SufficientStats& stats, const BasePolicy& base,
                 double beta, double delta);
double slic_loss(const PolicyParams& theta, std::span<const PreferenceDatum> records,
                 const BasePolicy& base, double beta, double delta);
// Right derivative; the loss has kinks where a hinge switches on.
double slic_loss_derivative(const PolicyParams& theta, const SufficientStats& stats,
                            const BasePolicy& base, double beta, double delta);

/// Minimizer of policy_loss: per-message mass proportional to base mass times
/// e^{psi_z * num_data / beta}. With beta = 0 all mass goes to the higher-reward
/// category (log-odds clamped to +-800); equal rewards keep the base policy.
PolicyParams optimal_policy(const RewardParams& reward, const BasePolicy& base,
                            std::uint64_t num_data, double beta);

// Fitters. Results are gauge-fixed (psi1 = 0, theta1 = 0).

FitResult<RewardParams> fit_reward(const SufficientStats& stats, const FitSettings& settings = {});

/// fit_reward followed by optimal_policy. Requires beta > 0.
FitResult<PolicyParams> fit_rlpo(const SufficientStats& stats, const BasePolicy& base,
                                 const FitSettings& settings = {});

/// Direct minimization of the DPO loss. Requires beta > 0.
FitResult<PolicyParams> fit_dpo(const SufficientStats& stats, const BasePolicy& base,
                                const FitSettings& settings = {});

/// beta = 0 is allowed; the minimizer then exists only when both categories
/// are chosen from some mixed set (or no set is mixed).
FitResult<PolicyParams> fit_il(const SufficientStats& stats, const BasePolicy& base,
                               const FitSettings& settings = {});

/// Requires set size 2 and beta > 0. Kinks resolve to the leftmost minimizer
/// in the log-odds coordinate.
FitResult<PolicyParams> fit_slic(const SufficientStats& stats, const BasePolicy& base,
                                 const FitSettings& settings = {});

}  // namespace prefsim
