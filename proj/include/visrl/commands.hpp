#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "visrl/data_prep.hpp"
#include "visrl/matching.hpp"
#include "visrl/simulate.hpp"
#include "visrl/wire.hpp"

// Stream-level implementations of the CLI subcommands. Each returns the
// process exit code (0 success, 1 data error) and writes diagnostics to `err`.
namespace visrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

struct ScoreOptions {
  Thresholds thresholds;
  unsigned threads = 1;
};

// Scores every rollout group against its sample. Records are ordered by
// (sample_id, rollout_index); output is identical for any thread count.
std::vector<wire::RewardRecord> score_records(const std::vector<Sample>& samples,
                                              const std::vector<wire::RolloutGroup>& groups,
                                              const ScoreOptions& opts);

int cmd_score(std::istream& samples, std::istream& rollouts, std::ostream& out,
              std::ostream& err, const ScoreOptions& opts = {});

// Writes one JSON report. Detection predictions without a "score" use the
// area-ratio proxy.
int cmd_eval(std::istream& preds, std::istream& gts, TaskType task, std::ostream& out,
             std::ostream& err);

// Mask paths in the annotations are relative to `masks_dir`. Failed records
// are reported on `err` as JSON lines; the exit code is non-zero only when
// `strict` is set and at least one record failed.
int cmd_prep(const std::filesystem::path& masks_dir, std::istream& annotations, bool strict,
             std::ostream& out, std::ostream& err);

// One JSON line per sigma.
int cmd_simulate(std::istream& samples, const std::vector<double>& sigmas, const SimConfig& cfg,
                 const Thresholds& thr, std::ostream& out, std::ostream& err);

int cmd_bench(std::size_t objects, std::size_t repetitions, std::ostream& out, std::ostream& err);

// Keyword rule used when --task is omitted: "how many" / "count" -> counting,
// "segment" / "mask" -> segmentation, otherwise detection. Not a learned router.
TaskType route_task(std::string_view query);

}  // namespace visrl::cli
