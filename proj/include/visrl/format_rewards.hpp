#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "visrl/rollout_parser.hpp"

namespace visrl {

// Every field is exactly 0.0 or 1.0.
struct FormatScores {
  double thinking = 0.0;
  double answer_format = 0.0;
  double non_repeat = 0.0;
};

// 1.0 iff both tag blocks were extracted. An empty think block still counts.
double thinking_reward(const ParsedRollout& parsed);

// 1.0 iff the answer block parsed under the strict schema.
double answer_format_reward(const ParsedRollout& parsed);

/// 1.0 unless two sentences of the reasoning text normalize to the same
/// string. Sentences end at '.', '!', '?' or newline; normalization lowercases,
/// strips ASCII punctuation and collapses whitespace. Normalized sentences
/// shorter than three words are ignored.
double non_repeat_reward(std::string_view think);

// Normalized sentences that take part in the repetition check.
std::vector<std::string> normalized_sentences(std::string_view think);

// non_repeat is 0 when the think block could not be extracted.
FormatScores format_scores(const ParsedRollout& parsed);

}  // namespace visrl
