#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "visrl/data_prep.hpp"
#include "visrl/matching.hpp"
#include "visrl/reward.hpp"

namespace visrl {

// Synthetic policy: each rollout copies the ground truth, adds Gaussian
// noise of scale noise_sigma to every coordinate and drops each object with
// probability drop_prob.
struct SimConfig {
  double noise_sigma = 0.0;
  std::size_t group_size = 8;
  std::size_t groups = 1;
  double drop_prob = 0.0;
  std::uint64_t seed = 0;

  // Throws InputError on out-of-range fields.
  void validate() const;
};

struct SimGroup {
  std::vector<std::string> rollouts;
  GroupScore score;
};

struct SimSummary {
  double sigma = 0.0;
  std::size_t groups = 0;
  std::size_t rollouts = 0;
  double mean_total = 0.0;
  double mean_accuracy = 0.0;
  std::size_t degenerate_groups = 0;  // all totals equal
  // argmax advantage == argmax total in every non-degenerate group
  bool argmax_consistent = true;
};

// Well-formed rollout text with the given instances as the answer.
std::string make_rollout_text(const std::string& query, std::span<const Instance> instances);

/// One group. The random stream depends only on (seed, sample_index,
/// group_index), never on sigma or on other groups, so parallel and serial
/// runs agree bit for bit and different sigmas reuse the same noise draws.
SimGroup simulate_group(const Sample& sample, const SimConfig& cfg, const Thresholds& thr,
                        std::size_t sample_index, std::size_t group_index);

std::vector<SimGroup> simulate(const Sample& sample, const SimConfig& cfg,
                               const Thresholds& thr = {}, std::size_t sample_index = 0);

SimSummary summarize(std::span<const SimGroup> groups, double sigma);

/// Runs cfg.groups groups for every sample at every sigma in `sigmas`
/// (cfg.noise_sigma is ignored) and returns one summary per sigma.
/// Samples without ground truths are skipped.
std::vector<SimSummary> simulate_ladder(std::span<const Sample> samples,
                                        std::span<const double> sigmas, const SimConfig& cfg,
                                        const Thresholds& thr = {});

}  // namespace visrl
