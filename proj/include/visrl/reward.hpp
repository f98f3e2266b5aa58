#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "visrl/format_rewards.hpp"
#include "visrl/matching.hpp"

namespace visrl {

struct RewardBreakdown {
  FormatScores format;
  MatchResult match;
  double total = 0.0;

  double accuracy() const { return match.accuracy_reward; }
};

/// Scores one raw rollout against canonical ground truths. Malformed text is
/// not an error: it earns zero for every component it fails. Predicted boxes
/// are canonicalized only after the answer-format judgment.
RewardBreakdown score_rollout(std::string_view text, std::span<const Instance> gts,
                              const Thresholds& thr = {});

struct GroupScore {
  std::vector<RewardBreakdown> rollouts;
  std::vector<double> advantages;
};

// Scores every rollout of one group and computes their advantages.
GroupScore score_group(std::span<const std::string> rollouts, std::span<const Instance> gts,
                       const Thresholds& thr = {});

}  // namespace visrl
