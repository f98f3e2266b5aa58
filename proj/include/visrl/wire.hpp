#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "visrl/data_prep.hpp"
#include "visrl/types.hpp"

// JSONL wire formats shared by the CLI commands. One record per line, UTF-8,
// numbers rounded to 6 significant digits on output.
namespace visrl::wire {

using json = nlohmann::ordered_json;

// Integral values become JSON integers, everything else a rounded double.
json number(double value);

json instance_to_json(const Instance& inst);
// Throws std::runtime_error describing the first schema violation.
Instance instance_from_json(const json& j);
std::vector<Instance> instances_from_json(const json& j);

// {"sample_id","image_width","image_height","query","task_type","gt":[...]}
json sample_to_json(const Sample& s);
Sample sample_from_json(const json& j);

// Calls `fn(record, line_number)` for every non-blank line. Throws DataError
// on invalid JSON; exceptions from `fn` are rethrown as DataError with the line.
void for_each_record(std::istream& in, const std::function<void(const json&, std::size_t)>& fn);

// Reads and validates a samples file. Duplicate ids are an error.
std::vector<Sample> read_samples(std::istream& in);

struct RolloutGroup {
  std::string sample_id;
  std::vector<std::string> rollouts;
  std::size_t line = 0;  // source line, 0 if not read from a file
};

// {"sample_id","group":[rollout_text,...]}
std::vector<RolloutGroup> read_rollout_groups(std::istream& in);
json rollout_group_to_json(const RolloutGroup& g);

struct RewardRecord {
  std::string sample_id;
  std::size_t rollout_index = 0;
  double thinking = 0.0;
  double answer_format = 0.0;
  double non_repeat = 0.0;
  double accuracy = 0.0;
  double total = 0.0;
  std::optional<double> advantage;
};

// {"sample_id","rollout_index","thinking","answer_format","non_repeat","accuracy","total","advantage"}
json reward_record_to_json(const RewardRecord& r);

// {"width","height","data"} with data the row-major '0'/'1' string.
json mask_to_json(const MaskGrid& m);
MaskGrid mask_from_json(const json& j);

}  // namespace visrl::wire
