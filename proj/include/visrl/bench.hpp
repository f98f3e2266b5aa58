#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "visrl/matching.hpp"

namespace visrl {

/// Reference implementation of the accuracy reward without batch
/// computation: boxes are kept as nested vectors, every pair and every
/// criterion goes through its own scalar call on freshly copied coordinate
/// lists, and results land in nested-vector matrices before the Hungarian
/// solve. Same numbers as accuracy_reward, used as the timing baseline.
MatchResult accuracy_reward_unbatched(std::span<const Instance> preds,
                                      std::span<const Instance> gts, const Thresholds& thr = {});

struct BenchReport {
  std::size_t objects = 0;
  std::size_t repetitions = 0;
  double batch_seconds = 0.0;  // mean wall time per call
  double naive_seconds = 0.0;
  double speedup = 0.0;        // naive / batch
  bool results_agree = true;
};

// Times both paths at K = N = objects on random instances in a 1000x1000 frame.
// Throws InputError if objects or repetitions is zero.
BenchReport bench_matching(std::size_t objects, std::size_t repetitions, std::uint64_t seed = 7);

}  // namespace visrl
