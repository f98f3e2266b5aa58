#include "visrl/rollout_parser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <utility>

#include <json.hpp>

namespace visrl {
namespace {

using nlohmann::json;

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct TagHits {
  std::size_t first = std::string_view::npos;
  std::size_t count = 0;
};

TagHits find_tag(std::string_view text, std::string_view tag) {
  TagHits hits;
  for (std::size_t pos = text.find(tag); pos != std::string_view::npos;
       pos = text.find(tag, pos + tag.size())) {
    if (hits.count == 0) hits.first = pos;
    ++hits.count;
  }
  return hits;
}

// Reads a fixed-arity numeric array into `out`.
std::optional<SchemaError> read_numbers(const json& value, std::span<double> out) {
  if (!value.is_array() || value.size() != out.size()) return SchemaError::wrong_arity;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const json& v = value[i];
    if (!v.is_number()) return SchemaError::non_numeric;
    const double d = v.get<double>();
    if (!std::isfinite(d)) return SchemaError::non_numeric;
    out[i] = d;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(TagError e) {
  switch (e) {
    case TagError::no_think: return "no_think";
    case TagError::no_answer: return "no_answer";
    case TagError::wrong_order: return "wrong_order";
    case TagError::duplicate_tags: return "duplicate_tags";
    case TagError::interleaved: return "interleaved";
  }
  return "unknown";
}

std::string_view to_string(SchemaError e) {
  switch (e) {
    case SchemaError::not_json: return "not_json";
    case SchemaError::not_array: return "not_array";
    case SchemaError::extra_key: return "extra_key";
    case SchemaError::missing_key: return "missing_key";
    case SchemaError::wrong_arity: return "wrong_arity";
    case SchemaError::non_numeric: return "non_numeric";
  }
  return "unknown";
}

std::string_view to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::ok: return "OK";
    case ParseStatus::missing_tags: return "MISSING_TAGS";
    case ParseStatus::bad_json: return "BAD_JSON";
    case ParseStatus::bad_schema: return "BAD_SCHEMA";
  }
  return "unknown";
}

std::variant<Blocks, TagError> extract_blocks(std::string_view text) {
  const TagHits think_open = find_tag(text, kThinkOpen);
  const TagHits think_close = find_tag(text, kThinkClose);
  const TagHits answer_open = find_tag(text, kAnswerOpen);
  const TagHits answer_close = find_tag(text, kAnswerClose);

  if (think_open.count > 1 || think_close.count > 1 || answer_open.count > 1 ||
      answer_close.count > 1) {
    return TagError::duplicate_tags;
  }
  if (think_open.count == 0 || think_close.count == 0) return TagError::no_think;
  if (answer_open.count == 0 || answer_close.count == 0) return TagError::no_answer;

  const std::size_t to = think_open.first;
  const std::size_t tc = think_close.first;
  const std::size_t ao = answer_open.first;
  const std::size_t ac = answer_close.first;

  if (tc < to || ac < ao) return TagError::interleaved;
  if (ac < to) return TagError::wrong_order;
  if (ao < tc + kThinkClose.size()) return TagError::interleaved;

  const std::string_view gap = text.substr(tc + kThinkClose.size(), ao - tc - kThinkClose.size());
  if (!std::all_of(gap.begin(), gap.end(), is_space)) return TagError::interleaved;

  const std::size_t think_begin = to + kThinkOpen.size();
  const std::size_t answer_begin = ao + kAnswerOpen.size();
  return Blocks{
      std::string(trim(text.substr(think_begin, tc - think_begin))),
      std::string(trim(text.substr(answer_begin, ac - answer_begin))),
  };
}

std::variant<std::vector<Instance>, SchemaError> parse_answer(std::string_view answer_raw) {
  // nlohmann keeps the last of repeated keys; track keys per object so a
  // repeated key is rejected instead of silently merged.
  std::vector<std::set<std::string>> open_objects;
  bool repeated_key = false;
  json::parser_callback_t track_keys = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case json::parse_event_t::object_end:
        if (!open_objects.empty()) open_objects.pop_back();
        break;
      case json::parse_event_t::key:
        if (!open_objects.empty() && parsed.is_string() &&
            !open_objects.back().insert(parsed.get<std::string>()).second) {
          repeated_key = true;
        }
        break;
      default:
        break;
    }
    return true;
  };

  const json doc = json::parse(answer_raw.begin(), answer_raw.end(), track_keys,
                               /*allow_exceptions=*/false);
  if (doc.is_discarded()) return SchemaError::not_json;
  if (!doc.is_array()) return SchemaError::not_array;
  if (repeated_key) return SchemaError::extra_key;

  std::vector<Instance> out;
  out.reserve(doc.size());
  for (const json& element : doc) {
    if (!element.is_object()) return SchemaError::missing_key;
    const auto bbox_it = element.find("bbox_2d");
    const auto point_it = element.find("point_2d");
    if (bbox_it == element.end() || point_it == element.end()) return SchemaError::missing_key;
    if (element.size() != 2) return SchemaError::extra_key;

    std::array<double, 4> b{};
    std::array<double, 2> p{};
    if (auto err = read_numbers(*bbox_it, b)) return *err;
    if (auto err = read_numbers(*point_it, p)) return *err;
    out.push_back(Instance{{b[0], b[1], b[2], b[3]}, {p[0], p[1]}});
  }
  return out;
}

ParsedRollout parse_rollout(std::string_view text) {
  ParsedRollout parsed;
  auto blocks = extract_blocks(text);
  if (const auto* err = std::get_if<TagError>(&blocks)) {
    parsed.status = ParseStatus::missing_tags;
    parsed.tag_error = *err;
    return parsed;
  }
  auto& b = std::get<Blocks>(blocks);
  parsed.think = std::move(b.think);
  parsed.answer_raw = std::move(b.answer_raw);

  auto answer = parse_answer(parsed.answer_raw);
  if (const auto* err = std::get_if<SchemaError>(&answer)) {
    parsed.status = *err == SchemaError::not_json ? ParseStatus::bad_json : ParseStatus::bad_schema;
    parsed.schema_error = *err;
    return parsed;
  }
  parsed.status = ParseStatus::ok;
  parsed.instances = std::move(std::get<std::vector<Instance>>(answer));
  return parsed;
}

Instance canonicalize(Instance instance) {
  Box& b = instance.bbox;
  if (b.x1 > b.x2) std::swap(b.x1, b.x2);
  if (b.y1 > b.y2) std::swap(b.y1, b.y2);
  return instance;
}

std::vector<Instance> canonicalize(std::span<const Instance> instances) {
  std::vector<Instance> out;
  out.reserve(instances.size());
  for (const Instance& inst : instances) out.push_back(canonicalize(inst));
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

double round_to_wire(double value) { return std::strtod(format_number(value).c_str(), nullptr); }

std::string serialize_answer(std::span<const Instance> instances) {
  std::string out = "[";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    if (i) out += ',';
    out += "{\"bbox_2d\":[";
    out += format_number(inst.bbox.x1) + ',' + format_number(inst.bbox.y1) + ',' +
           format_number(inst.bbox.x2) + ',' + format_number(inst.bbox.y2);
    out += "],\"point_2d\":[";
    out += format_number(inst.point.x) + ',' + format_number(inst.point.y);
    out += "]}";
  }
  out += ']';
  return out;
}

}  // namespace visrl
