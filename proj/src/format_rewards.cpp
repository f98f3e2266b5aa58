#include "visrl/format_rewards.hpp"

#include <cctype>
#include <unordered_set>

namespace visrl {
namespace {

constexpr std::size_t kMinSentenceWords = 3;

bool ends_sentence(char c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

// Returns the normalized sentence and its word count.
std::pair<std::string, std::size_t> normalize(std::string_view sentence) {
  std::string out;
  std::size_t words = 0;
  bool pending_space = false;
  for (const char raw : sentence) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c < 0x80 && std::ispunct(c)) continue;
    if (pending_space || out.empty()) {
      if (pending_space) out += ' ';
      ++words;
      pending_space = false;
    }
    out += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
  }
  return {std::move(out), words};
}

}  // namespace

double thinking_reward(const ParsedRollout& parsed) {
  return parsed.status == ParseStatus::missing_tags ? 0.0 : 1.0;
}

double answer_format_reward(const ParsedRollout& parsed) {
  return parsed.status == ParseStatus::ok ? 1.0 : 0.0;
}

std::vector<std::string> normalized_sentences(std::string_view think) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= think.size(); ++i) {
    if (i != think.size() && !ends_sentence(think[i])) continue;
    auto [norm, words] = normalize(think.substr(start, i - start));
    if (words >= kMinSentenceWords) out.push_back(std::move(norm));
    start = i + 1;
  }
  return out;
}

double non_repeat_reward(std::string_view think) {
  std::unordered_set<std::string> seen;
  for (auto& sentence : normalized_sentences(think)) {
    if (!seen.insert(std::move(sentence)).second) return 0.0;
  }
  return 1.0;
}

FormatScores format_scores(const ParsedRollout& parsed) {
  FormatScores s;
  s.thinking = thinking_reward(parsed);
  s.answer_format = answer_format_reward(parsed);
  s.non_repeat = s.thinking > 0.0 ? non_repeat_reward(parsed.think) : 0.0;
  return s;
}

}  // namespace visrl
