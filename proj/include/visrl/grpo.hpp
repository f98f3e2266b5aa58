#pragma once

#include <span>
#include <vector>

#include "visrl/format_rewards.hpp"
#include "visrl/matching.hpp"

namespace visrl {

struct GrpoConfig {
  double epsilon = 0.2;  // clip range
  double beta = 0.0;     // KL coefficient
};

// Sequence-level quantities for one rollout.
struct RatioSample {
  double ratio = 1.0;  // pi_theta(o|x) / pi_theta_old(o|x)
  double logp_theta = 0.0;
  double logp_ref = 0.0;
};

/// Group-relative advantages (r_i - mean) / std with the population standard
/// deviation. A group whose rewards are all equal (including G = 1) gets all
/// zeros. Throws InputError on an empty group or a non-finite reward.
std::vector<double> group_advantages(std::span<const double> rewards);

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_term(double ratio, double advantage, double epsilon);

// exp(d) - d - 1 with d = logp_ref - logp_theta; never negative.
double kl_estimate(const RatioSample& sample);

struct ObjectiveTerm {
  RatioSample sample;
  double advantage = 0.0;
};

/// (1/G) sum_i [clipped_term(ratio_i, A_i, eps) - beta * kl_i].
/// Throws InputError on an empty list.
double grpo_objective(std::span<const ObjectiveTerm> terms, const GrpoConfig& cfg = {});

// thinking + answer_format + non_repeat + accuracy, in [0, 6].
double total_reward(const FormatScores& fmt, const MatchResult& acc);

}  // namespace visrl
