#include "visrl/reward.hpp"

#include "visrl/grpo.hpp"
#include "visrl/rollout_parser.hpp"

namespace visrl {

RewardBreakdown score_rollout(std::string_view text, std::span<const Instance> gts,
                              const Thresholds& thr) {
  const ParsedRollout parsed = parse_rollout(text);
  RewardBreakdown out;
  out.format = format_scores(parsed);
  if (parsed.instances) {
    const std::vector<Instance> preds = canonicalize(*parsed.instances);
    out.match = accuracy_reward(preds, gts, thr);
  }
  out.total = total_reward(out.format, out.match);
  return out;
}

GroupScore score_group(std::span<const std::string> rollouts, std::span<const Instance> gts,
                       const Thresholds& thr) {
  GroupScore group;
  group.rollouts.reserve(rollouts.size());
  std::vector<double> totals;
  totals.reserve(rollouts.size());
  for (const std::string& text : rollouts) {
    group.rollouts.push_back(score_rollout(text, gts, thr));
    totals.push_back(group.rollouts.back().total);
  }
  if (!totals.empty()) group.advantages = group_advantages(totals);
  return group;
}

}  // namespace visrl
