#include "visrl/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "visrl/errors.hpp"

namespace visrl {

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.empty()) throw InputError("reward group is empty");
  for (const double r : rewards) {
    if (!std::isfinite(r)) throw InputError("reward group contains a non-finite value");
  }

  std::vector<double> adv(rewards.size(), 0.0);
  const double first = rewards.front();
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == first; })) {
    return adv;
  }

  const double g = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (const double r : rewards) mean += r;
  mean /= g;
  double var = 0.0;
  for (const double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / g);
  if (!(sd > 0.0)) return adv;

  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

double clipped_term(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_estimate(const RatioSample& sample) {
  const double d = sample.logp_ref - sample.logp_theta;
  // expm1 keeps precision near d = 0; the true value is >= 0.
  return std::max(0.0, std::expm1(d) - d);
}

double grpo_objective(std::span<const ObjectiveTerm> terms, const GrpoConfig& cfg) {
  if (terms.empty()) throw InputError("objective needs at least one rollout");
  double sum = 0.0;
  for (const ObjectiveTerm& t : terms) {
    sum += clipped_term(t.sample.ratio, t.advantage, cfg.epsilon);
    if (cfg.beta != 0.0) sum -= cfg.beta * kl_estimate(t.sample);
  }
  return sum / static_cast<double>(terms.size());
}

double total_reward(const FormatScores& fmt, const MatchResult& acc) {
  return fmt.thinking + fmt.answer_format + fmt.non_repeat + acc.accuracy_reward;
}

}  // namespace visrl
