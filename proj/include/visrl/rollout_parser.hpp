#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "visrl/types.hpp"

namespace visrl {

enum class TagError { no_think, no_answer, wrong_order, duplicate_tags, interleaved };

enum class SchemaError {
  not_json,
  not_array,
  extra_key,
  missing_key,
  wrong_arity,
  non_numeric,
};

enum class ParseStatus { ok, missing_tags, bad_json, bad_schema };

std::string_view to_string(TagError e);
std::string_view to_string(SchemaError e);
std::string_view to_string(ParseStatus s);

struct Blocks {
  std::string think;
  std::string answer_raw;
};

struct ParsedRollout {
  std::string think;
  std::string answer_raw;
  ParseStatus status = ParseStatus::missing_tags;
  // Set only when status == ok. Instances are as emitted, not canonicalized.
  std::optional<std::vector<Instance>> instances;
  std::optional<TagError> tag_error;
  std::optional<SchemaError> schema_error;
};

/// Splits `<think>...</think>` followed by `<answer>...</answer>` out of raw
/// model text. Tags are case-sensitive and each must occur exactly once; only
/// whitespace may separate `</think>` from `<answer>`. Text before the think
/// block or after the answer block is ignored. Block contents are trimmed.
std::variant<Blocks, TagError> extract_blocks(std::string_view text);

/// Parses the strict answer grammar: a JSON array of objects with exactly the
/// keys "bbox_2d" (4 numbers) and "point_2d" (2 numbers).
std::variant<std::vector<Instance>, SchemaError> parse_answer(std::string_view answer_raw);

/// Full decomposition of one rollout. Never throws.
ParsedRollout parse_rollout(std::string_view text);

/// Swaps inverted box corners so x1 <= x2 and y1 <= y2. Idempotent.
Instance canonicalize(Instance instance);
std::vector<Instance> canonicalize(std::span<const Instance> instances);

/// Number text used by every wire format: up to 6 significant digits, no
/// negative zero. The value must be finite.
std::string format_number(double value);

/// Rounds to the value `format_number` prints.
double round_to_wire(double value);

/// Canonical answer JSON, e.g. `[{"bbox_2d":[10,100,200,210],"point_2d":[30,110]}]`.
std::string serialize_answer(std::span<const Instance> instances);

}  // namespace visrl
