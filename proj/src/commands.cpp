#include "visrl/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cctype>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "visrl/bench.hpp"
#include "visrl/errors.hpp"
#include "visrl/eval_metrics.hpp"
#include "visrl/mask_io.hpp"
#include "visrl/reward.hpp"
#include "visrl/rollout_parser.hpp"

namespace visrl::cli {
namespace {

using wire::json;

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct EvalRecord {
  std::string sample_id;
  std::size_t line = 0;
  std::vector<Instance> instances;
  std::vector<std::optional<double>> scores;
  std::optional<long long> count;
  std::optional<MaskGrid> mask;
  std::optional<int> image_width, image_height;
  std::optional<TaskType> task_type;
  std::string query;
};

EvalRecord eval_record_from_json(const json& j, std::size_t line, const char* instances_key) {
  if (!j.is_object()) throw std::runtime_error("record is not a JSON object");
  EvalRecord r;
  r.line = line;
  const auto id = j.find("sample_id");
  if (id == j.end() || !id->is_string()) throw std::runtime_error("missing string field \"sample_id\"");
  r.sample_id = id->get<std::string>();

  if (const auto it = j.find(instances_key); it != j.end()) {
    if (!it->is_array()) throw std::runtime_error(std::string("\"") + instances_key + "\" must be an array");
    for (const json& e : *it) {
      r.instances.push_back(canonicalize(wire::instance_from_json(e)));
      std::optional<double> score;
      if (e.contains("score")) {
        if (!e["score"].is_number()) throw std::runtime_error("\"score\" must be a number");
        score = e["score"].get<double>();
      }
      r.scores.push_back(score);
    }
  } else if (const auto ans = j.find("answer"); ans != j.end()) {
    if (!ans->is_string()) throw std::runtime_error("\"answer\" must be a string");
    const ParsedRollout parsed = parse_rollout(ans->get<std::string>());
    if (parsed.instances) {
      r.instances = canonicalize(*parsed.instances);
      r.scores.assign(r.instances.size(), std::nullopt);
    }
  }
  if (const auto it = j.find("count"); it != j.end()) {
    if (!it->is_number_integer()) throw std::runtime_error("\"count\" must be an integer");
    r.count = it->get<long long>();
  }
  if (const auto it = j.find("mask"); it != j.end()) r.mask = wire::mask_from_json(*it);
  if (const auto it = j.find("image_width"); it != j.end() && it->is_number_integer()) {
    r.image_width = it->get<int>();
  }
  if (const auto it = j.find("image_height"); it != j.end() && it->is_number_integer()) {
    r.image_height = it->get<int>();
  }
  if (const auto it = j.find("task_type"); it != j.end() && it->is_string()) {
    r.task_type = parse_task_type(it->get<std::string>());
  }
  if (const auto it = j.find("query"); it != j.end() && it->is_string()) r.query = it->get<std::string>();
  return r;
}

std::map<std::string, EvalRecord> read_eval_records(std::istream& in, const char* instances_key) {
  std::map<std::string, EvalRecord> out;
  wire::for_each_record(in, [&](const json& j, std::size_t line) {
    EvalRecord r = eval_record_from_json(j, line, instances_key);
    const std::string id = r.sample_id;
    if (!out.emplace(id, std::move(r)).second) {
      throw std::runtime_error("duplicate sample_id \"" + id + "\"");
    }
  });
  return out;
}

}  // namespace

TaskType route_task(std::string_view query) {
  std::string q(query);
  std::transform(q.begin(), q.end(), q.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (q.find("how many") != std::string::npos || q.find("count") != std::string::npos) {
    return TaskType::counting;
  }
  if (q.find("segment") != std::string::npos || q.find("mask") != std::string::npos) {
    return TaskType::segmentation;
  }
  return TaskType::detection;
}

std::vector<wire::RewardRecord> score_records(const std::vector<Sample>& samples,
                                              const std::vector<wire::RolloutGroup>& groups,
                                              const ScoreOptions& opts) {
  opts.thresholds.validate();
  std::map<std::string, const Sample*> by_id;
  for (const Sample& s : samples) by_id[s.sample_id] = &s;
  for (const auto& g : groups) {
    if (!by_id.count(g.sample_id)) {
      throw DataError("rollout group references unknown sample_id \"" + g.sample_id + "\"",
                      g.line);
    }
  }

  std::vector<const wire::RolloutGroup*> order;
  for (const auto& g : groups) order.push_back(&g);
  std::sort(order.begin(), order.end(),
            [](const auto* a, const auto* b) { return a->sample_id < b->sample_id; });

  std::vector<GroupScore> scored(order.size());
  parallel_for(order.size(), opts.threads, [&](std::size_t i) {
    const wire::RolloutGroup& g = *order[i];
    scored[i] = score_group(g.rollouts, by_id.at(g.sample_id)->gt_instances, opts.thresholds);
  });

  std::vector<wire::RewardRecord> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const GroupScore& gs = scored[i];
    for (std::size_t r = 0; r < gs.rollouts.size(); ++r) {
      const RewardBreakdown& b = gs.rollouts[r];
      wire::RewardRecord rec;
      rec.sample_id = order[i]->sample_id;
      rec.rollout_index = r;
      rec.thinking = b.format.thinking;
      rec.answer_format = b.format.answer_format;
      rec.non_repeat = b.format.non_repeat;
      rec.accuracy = b.accuracy();
      rec.total = b.total;
      rec.advantage = gs.advantages[r];
      out.push_back(std::move(rec));
    }
  }
  return out;
}

int cmd_score(std::istream& samples, std::istream& rollouts, std::ostream& out,
              std::ostream& err, const ScoreOptions& opts) {
  std::vector<Sample> sample_list;
  try {
    sample_list = wire::read_samples(samples);
  } catch (const std::exception& e) {
    err << "error: samples: " << e.what() << '\n';
    return kExitDataError;
  }
  try {
    const auto groups = wire::read_rollout_groups(rollouts);
    for (const auto& rec : score_records(sample_list, groups, opts)) {
      out << dump_line(wire::reward_record_to_json(rec)) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: rollouts: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_eval(std::istream& preds_in, std::istream& gts_in, TaskType task, std::ostream& out,
             std::ostream& err) {
  try {
    const auto preds = read_eval_records(preds_in, "pred");
    const auto gts = read_eval_records(gts_in, "gt");

    std::vector<std::string> orphans;
    for (const auto& [id, r] : preds) {
      if (!gts.count(id)) orphans.push_back("pred:" + id);
    }
    for (const auto& [id, r] : gts) {
      if (!preds.count(id)) orphans.push_back("gt:" + id);
    }
    if (!orphans.empty()) {
      std::string list;
      for (const auto& o : orphans) list += (list.empty() ? "" : ", ") + o;
      throw InputError("sample ids do not match: " + list);
    }

    json metrics = json::object();
    std::size_t num_predictions = 0, num_ground_truths = 0;
    switch (task) {
      case TaskType::detection: {
        std::vector<ScoredPrediction> scored;
        GroundTruthBoxes boxes;
        for (const auto& [id, g] : gts) {
          auto& list = boxes[id];
          for (const Instance& inst : g.instances) list.push_back(inst.bbox);
          num_ground_truths += g.instances.size();
        }
        for (const auto& [id, p] : preds) {
          const EvalRecord& g = gts.at(id);
          for (std::size_t i = 0; i < p.instances.size(); ++i) {
            double score = 0.0;
            if (p.scores[i]) {
              score = *p.scores[i];
            } else {
              const auto w = p.image_width ? p.image_width : g.image_width;
              const auto h = p.image_height ? p.image_height : g.image_height;
              if (!w || !h) {
                throw DataError("prediction has no score and no image size for the area-ratio proxy",
                                p.line);
              }
              score = area_ratio_score(p.instances[i].bbox, *w, *h);
            }
            scored.push_back({id, p.instances[i].bbox, score});
          }
        }
        num_predictions = scored.size();
        metrics["ap50"] = wire::number(ap_at_iou(scored, boxes, 0.5));
        metrics["ap75"] = wire::number(ap_at_iou(scored, boxes, 0.75));
        metrics["coco_ap"] = wire::number(coco_ap(scored, boxes));
        break;
      }
      case TaskType::segmentation: {
        std::vector<MaskGrid> pm, gm;
        for (const auto& [id, g] : gts) {
          const EvalRecord& p = preds.at(id);
          if (!g.mask) throw DataError("ground truth has no \"mask\"", g.line);
          if (!p.mask) throw DataError("prediction has no \"mask\"", p.line);
          gm.push_back(*g.mask);
          pm.push_back(*p.mask);
        }
        num_predictions = pm.size();
        num_ground_truths = gm.size();
        metrics["giou"] = wire::number(g_iou(pm, gm));
        break;
      }
      case TaskType::counting: {
        std::vector<long long> pc, gc;
        for (const auto& [id, g] : gts) {
          const EvalRecord& p = preds.at(id);
          gc.push_back(g.count ? *g.count : static_cast<long long>(g.instances.size()));
          pc.push_back(p.count ? *p.count : static_cast<long long>(p.instances.size()));
        }
        num_predictions = pc.size();
        num_ground_truths = gc.size();
        metrics["count_accuracy"] = wire::number(count_accuracy(pc, gc));
        break;
      }
    }

    json report;
    report["task"] = to_string(task);
    report["num_samples"] = gts.size();
    report["num_predictions"] = num_predictions;
    report["num_ground_truths"] = num_ground_truths;
    report["metrics"] = std::move(metrics);
    out << dump_line(report) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_prep(const std::filesystem::path& masks_dir, std::istream& annotations, bool strict,
             std::ostream& out, std::ostream& err) {
  const MaskDecoderSet decoders;
  std::map<std::string, Sample> prepared;
  std::size_t failures = 0;

  auto report_failure = [&](const std::string& id, std::size_t line, const std::string& what) {
    ++failures;
    json e;
    e["sample_id"] = id;
    e["line"] = line;
    e["error"] = what;
    err << dump_line(e) << '\n';
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(annotations, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id;
    try {
      const json j = json::parse(line);
      if (!j.is_object() || !j.contains("sample_id") || !j["sample_id"].is_string()) {
        throw std::runtime_error("missing string field \"sample_id\"");
      }
      id = j["sample_id"].get<std::string>();
      if (prepared.count(id)) throw std::runtime_error("duplicate sample_id");
      if (!j.contains("objects") || !j["objects"].is_array() || j["objects"].empty()) {
        throw std::runtime_error("\"objects\" must be a non-empty array");
      }

      std::vector<ObjectAnnotation> objects;
      std::optional<std::pair<std::size_t, std::size_t>> dims;
      for (const json& o : j["objects"]) {
        if (!o.is_object() || !o.contains("text") || !o["text"].is_string() ||
            !o.contains("mask") || !o["mask"].is_string()) {
          throw std::runtime_error("each object needs string fields \"text\" and \"mask\"");
        }
        const MaskGrid mask = decoders.decode(masks_dir / o["mask"].get<std::string>());
        if (dims && *dims != std::pair{mask.width(), mask.height()}) {
          throw std::runtime_error("masks of one sample differ in size");
        }
        dims = std::pair{mask.width(), mask.height()};
        objects.push_back({o["text"].get<std::string>(), mask_to_bbox(mask), mask_to_point(mask)});
      }

      SampleFragment merged = merge_objects(objects);
      Sample s;
      s.sample_id = id;
      s.image_width = j.contains("image_width") ? j["image_width"].get<int>()
                                                : static_cast<int>(dims->first);
      s.image_height = j.contains("image_height") ? j["image_height"].get<int>()
                                                  : static_cast<int>(dims->second);
      s.task_type = TaskType::detection;
      if (j.contains("task_type")) {
        const auto tt = parse_task_type(j["task_type"].get<std::string>());
        if (!tt) throw std::runtime_error("unknown task_type");
        s.task_type = *tt;
      }
      s.query = j.contains("query") ? j["query"].get<std::string>() : merged.query;
      s.gt_instances = std::move(merged.instances);
      s = sanitize_annotation(std::move(s));
      validate_sample(s);
      prepared.emplace(id, std::move(s));
    } catch (const std::exception& e) {
      report_failure(id, line_no, e.what());
    }
  }

  for (const auto& [id, s] : prepared) out << dump_line(wire::sample_to_json(s)) << '\n';
  return strict && failures > 0 ? kExitDataError : kExitOk;
}

int cmd_simulate(std::istream& samples, const std::vector<double>& sigmas, const SimConfig& cfg,
                 const Thresholds& thr, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    thr.validate();
    const std::vector<Sample> list = wire::read_samples(samples);
    for (const SimSummary& s : simulate_ladder(list, sigmas, cfg, thr)) {
      json j;
      j["sigma"] = wire::number(s.sigma);
      j["groups"] = s.groups;
      j["rollouts"] = s.rollouts;
      j["mean_total"] = wire::number(s.mean_total);
      j["mean_accuracy"] = wire::number(s.mean_accuracy);
      j["degenerate_groups"] = s.degenerate_groups;
      j["argmax_consistent"] = s.argmax_consistent;
      out << dump_line(j) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

int cmd_bench(std::size_t objects, std::size_t repetitions, std::ostream& out, std::ostream& err) {
  try {
    const BenchReport r = bench_matching(objects, repetitions);
    json j;
    j["objects"] = r.objects;
    j["repetitions"] = r.repetitions;
    j["batch_seconds"] = wire::number(r.batch_seconds);
    j["naive_seconds"] = wire::number(r.naive_seconds);
    j["speedup"] = wire::number(r.speedup);
    j["results_agree"] = r.results_agree;
    out << dump_line(j) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace visrl::cli
