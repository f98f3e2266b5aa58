#include "visrl/wire.hpp"

#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include "visrl/errors.hpp"
#include "visrl/mask_io.hpp"
#include "visrl/rollout_parser.hpp"

namespace visrl::wire {
namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw std::runtime_error("record is not a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw std::runtime_error(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

long long require_integer(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) {
    throw std::runtime_error(std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<long long>();
}

template <std::size_t N>
std::array<double, N> numbers(const json& v, const char* key) {
  if (!v.is_array() || v.size() != N) {
    throw std::runtime_error(std::string("\"") + key + "\" must hold " + std::to_string(N) +
                             " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
      throw std::runtime_error(std::string("\"") + key + "\" holds a non-numeric value");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

json number(double value) {
  const double r = round_to_wire(value);
  if (std::abs(r) < 1e15 && r == std::floor(r)) return static_cast<long long>(r);
  return r;
}

json instance_to_json(const Instance& inst) {
  return json{{"bbox_2d",
               {number(inst.bbox.x1), number(inst.bbox.y1), number(inst.bbox.x2),
                number(inst.bbox.y2)}},
              {"point_2d", {number(inst.point.x), number(inst.point.y)}}};
}

Instance instance_from_json(const json& j) {
  const auto b = numbers<4>(require(j, "bbox_2d"), "bbox_2d");
  const auto p = numbers<2>(require(j, "point_2d"), "point_2d");
  return {{b[0], b[1], b[2], b[3]}, {p[0], p[1]}};
}

std::vector<Instance> instances_from_json(const json& j) {
  if (!j.is_array()) throw std::runtime_error("instance list must be an array");
  std::vector<Instance> out;
  out.reserve(j.size());
  for (const json& e : j) out.push_back(instance_from_json(e));
  return out;
}

json sample_to_json(const Sample& s) {
  json gt = json::array();
  for (const Instance& inst : s.gt_instances) gt.push_back(instance_to_json(inst));
  return json{{"sample_id", s.sample_id},         {"image_width", s.image_width},
              {"image_height", s.image_height},   {"query", s.query},
              {"task_type", to_string(s.task_type)}, {"gt", std::move(gt)}};
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.sample_id = require_string(j, "sample_id");
  s.image_width = static_cast<int>(require_integer(j, "image_width"));
  s.image_height = static_cast<int>(require_integer(j, "image_height"));
  s.query = require_string(j, "query");
  const std::string task = require_string(j, "task_type");
  const auto tt = parse_task_type(task);
  if (!tt) throw std::runtime_error("unknown task_type \"" + task + "\"");
  s.task_type = *tt;
  s.gt_instances = canonicalize(instances_from_json(require(j, "gt")));
  validate_sample(s);
  return s;
}

void for_each_record(std::istream& in, const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) throw DataError("invalid JSON", line_no);
    try {
      fn(record, line_no);
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(e.what(), line_no);
    }
  }
}

std::vector<Sample> read_samples(std::istream& in) {
  std::vector<Sample> out;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& j, std::size_t) {
    Sample s = sample_from_json(j);
    if (!seen.insert(s.sample_id).second) {
      throw std::runtime_error("duplicate sample_id \"" + s.sample_id + "\"");
    }
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<RolloutGroup> read_rollout_groups(std::istream& in) {
  std::vector<RolloutGroup> out;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& j, std::size_t line) {
    RolloutGroup g;
    g.line = line;
    g.sample_id = require_string(j, "sample_id");
    const json& group = require(j, "group");
    if (!group.is_array()) throw std::runtime_error("\"group\" must be an array of strings");
    for (const json& r : group) {
      if (!r.is_string()) throw std::runtime_error("\"group\" must be an array of strings");
      g.rollouts.push_back(r.get<std::string>());
    }
    if (!seen.insert(g.sample_id).second) {
      throw std::runtime_error("duplicate rollout group for sample_id \"" + g.sample_id + "\"");
    }
    out.push_back(std::move(g));
  });
  return out;
}

json rollout_group_to_json(const RolloutGroup& g) {
  return json{{"sample_id", g.sample_id}, {"group", g.rollouts}};
}

json reward_record_to_json(const RewardRecord& r) {
  json j{{"sample_id", r.sample_id},
         {"rollout_index", r.rollout_index},
         {"thinking", number(r.thinking)},
         {"answer_format", number(r.answer_format)},
         {"non_repeat", number(r.non_repeat)},
         {"accuracy", number(r.accuracy)},
         {"total", number(r.total)}};
  j["advantage"] = r.advantage ? number(*r.advantage) : json(nullptr);
  return j;
}

json mask_to_json(const MaskGrid& m) {
  return json{{"width", m.width()}, {"height", m.height()}, {"data", mask_to_bitstring(m)}};
}

MaskGrid mask_from_json(const json& j) {
  const long long w = require_integer(j, "width");
  const long long h = require_integer(j, "height");
  if (w <= 0 || h <= 0) throw std::runtime_error("mask dimensions must be positive");
  return mask_from_bitstring(static_cast<std::size_t>(w), static_cast<std::size_t>(h),
                             require_string(j, "data"));
}

}  // namespace visrl::wire
