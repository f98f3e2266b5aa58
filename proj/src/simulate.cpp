#include "visrl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>

#include "visrl/errors.hpp"
#include "visrl/rollout_parser.hpp"

namespace visrl {
namespace {

// mt19937_64 is fully specified by the standard; the distributions below are
// written out so the stream does not depend on the standard library vendor.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t sample_index, std::uint64_t group_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sample_index),
                      static_cast<std::uint32_t>(sample_index >> 32),
                      static_cast<std::uint32_t>(group_index),
                      static_cast<std::uint32_t>(group_index >> 32)};
    rng_.seed(seq);
  }

  // Uniform in (0, 1].
  double uniform() { return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void SimConfig::validate() const {
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw InputError("noise sigma must be >= 0");
  if (group_size < 2) throw InputError("group size must be at least 2");
  if (groups < 1) throw InputError("need at least one group");
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw InputError("drop probability must be in [0, 1]");
}

std::string make_rollout_text(const std::string& query, std::span<const Instance> instances) {
  std::string text = "<think>The query asks for " + query + ".\nI can see " +
                     std::to_string(instances.size()) +
                     " matching objects and will report a box and a point for each of them.</think>\n";
  text += "<answer>" + serialize_answer(instances) + "</answer>";
  return text;
}

SimGroup simulate_group(const Sample& sample, const SimConfig& cfg, const Thresholds& thr,
                        std::size_t sample_index, std::size_t group_index) {
  if (sample.gt_instances.empty()) throw InputError("simulate needs at least one gt instance");
  NoiseStream noise(cfg.seed, sample_index, group_index);
  const double s = cfg.noise_sigma;

  SimGroup group;
  group.rollouts.reserve(cfg.group_size);
  for (std::size_t r = 0; r < cfg.group_size; ++r) {
    std::vector<Instance> emitted;
    for (const Instance& gt : sample.gt_instances) {
      // Draw every variate even for dropped objects to keep streams aligned across configs.
      const double z[6] = {noise.normal(), noise.normal(), noise.normal(),
                           noise.normal(), noise.normal(), noise.normal()};
      if (noise.uniform() <= cfg.drop_prob) continue;
      emitted.push_back({{gt.bbox.x1 + s * z[0], gt.bbox.y1 + s * z[1], gt.bbox.x2 + s * z[2],
                          gt.bbox.y2 + s * z[3]},
                         {gt.point.x + s * z[4], gt.point.y + s * z[5]}});
    }
    group.rollouts.push_back(make_rollout_text(sample.query, emitted));
  }
  group.score = score_group(group.rollouts, sample.gt_instances, thr);
  return group;
}

std::vector<SimGroup> simulate(const Sample& sample, const SimConfig& cfg, const Thresholds& thr,
                               std::size_t sample_index) {
  cfg.validate();
  std::vector<SimGroup> out;
  out.reserve(cfg.groups);
  for (std::size_t g = 0; g < cfg.groups; ++g) {
    out.push_back(simulate_group(sample, cfg, thr, sample_index, g));
  }
  return out;
}

SimSummary summarize(std::span<const SimGroup> groups, double sigma) {
  SimSummary sum;
  sum.sigma = sigma;
  sum.groups = groups.size();
  double total = 0.0, accuracy = 0.0;
  for (const SimGroup& g : groups) {
    std::vector<double> totals;
    for (const RewardBreakdown& r : g.score.rollouts) {
      total += r.total;
      accuracy += r.accuracy();
      totals.push_back(r.total);
      ++sum.rollouts;
    }
    if (totals.empty()) continue;
    if (std::all_of(totals.begin(), totals.end(), [&](double t) { return t == totals.front(); })) {
      ++sum.degenerate_groups;
      continue;
    }
    if (argmax(totals) != argmax(g.score.advantages)) sum.argmax_consistent = false;
  }
  if (sum.rollouts > 0) {
    sum.mean_total = total / static_cast<double>(sum.rollouts);
    sum.mean_accuracy = accuracy / static_cast<double>(sum.rollouts);
  }
  return sum;
}

std::vector<SimSummary> simulate_ladder(std::span<const Sample> samples,
                                        std::span<const double> sigmas, const SimConfig& cfg,
                                        const Thresholds& thr) {
  std::vector<SimSummary> out;
  for (const double sigma : sigmas) {
    SimConfig run = cfg;
    run.noise_sigma = sigma;
    run.validate();
    std::vector<SimGroup> all;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].gt_instances.empty()) continue;
      auto groups = simulate(samples[i], run, thr, i);
      std::move(groups.begin(), groups.end(), std::back_inserter(all));
    }
    out.push_back(summarize(all, sigma));
  }
  return out;
}

}  // namespace visrl
