// visrl: reward scoring, evaluation, data preparation and simulation CLI.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "visrl/commands.hpp"
#include "visrl/rollout_parser.hpp"

namespace {

using namespace visrl;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  return in;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw FileError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void add_threshold_options(CLI::App* cmd, Thresholds& thr) {
  cmd->add_option("--iou-min", thr.iou_min, "IoU must exceed this to pass")->capture_default_str();
  cmd->add_option("--box-l1-max", thr.box_l1_max, "box L1 (px) must be below this")
      ->capture_default_str();
  cmd->add_option("--point-l1-max", thr.point_l1_max, "point L1 (px) must be below this")
      ->capture_default_str();
}

// Task used when --task is omitted: the first task_type in the gts file,
// else the keyword rule on the first query.
TaskType infer_task(const std::string& gts_text) {
  std::istringstream in(gts_text);
  std::string line;
  std::optional<std::string> first_query;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_object()) continue;
    if (j.contains("task_type") && j["task_type"].is_string()) {
      if (auto t = parse_task_type(j["task_type"].get<std::string>())) return *t;
    }
    if (!first_query && j.contains("query") && j["query"].is_string()) {
      first_query = j["query"].get<std::string>();
    }
  }
  return cli::route_task(first_query.value_or(""));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward scoring, matching and evaluation for multi-object visual perception"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "visrl 1.0.0");

  std::string out_path;

  cli::ScoreOptions score_opts;
  std::string samples_path, rollouts_path;
  auto* score = app.add_subcommand("score", "score rollout groups and compute advantages");
  score->add_option("--samples", samples_path, "samples JSONL")->required();
  score->add_option("--rollouts", rollouts_path, "rollouts JSONL")->required();
  add_threshold_options(score, score_opts.thresholds);
  score->add_option("--threads", score_opts.threads, "worker threads")->check(CLI::Range(1u, 256u));
  score->add_option("--out", out_path, "output file (default stdout)");

  std::string preds_path, gts_path, task_name;
  auto* eval = app.add_subcommand("eval", "evaluate predictions against ground truth");
  eval->add_option("--preds", preds_path, "predictions JSONL")->required();
  eval->add_option("--gts", gts_path, "ground truth JSONL")->required();
  eval->add_option("--task", task_name, "metric family; defaults to the gts task_type")
      ->check(CLI::IsMember({"detection", "segmentation", "counting"}));
  eval->add_option("--out", out_path, "output file (default stdout)");

  std::string masks_dir, annotations_path;
  bool strict = false;
  auto* prep = app.add_subcommand("prep", "build samples from mask annotations");
  prep->add_option("--masks", masks_dir, "directory holding mask files")->required();
  prep->add_option("--annotations", annotations_path, "annotations JSONL")->required();
  prep->add_flag("--strict", strict, "exit non-zero if any record fails");
  prep->add_option("--out", out_path, "output file (default stdout)");

  SimConfig sim_cfg;
  Thresholds sim_thr;
  std::vector<double> sigmas;
  std::string sim_samples;
  auto* sim = app.add_subcommand("simulate", "run the synthetic noisy policy over a sigma ladder");
  sim->add_option("--samples", sim_samples, "samples JSONL")->required();
  sim->add_option("--sigma", sigmas, "comma separated noise levels in pixels")
      ->required()
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--group-size", sim_cfg.group_size, "rollouts per group")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  sim->add_option("--groups", sim_cfg.groups, "groups per sample and sigma")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_cfg.seed, "random seed")->capture_default_str();
  sim->add_option("--drop-prob", sim_cfg.drop_prob, "chance of omitting each gt object")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  add_threshold_options(sim, sim_thr);
  sim->add_option("--out", out_path, "output file (default stdout)");

  std::size_t bench_objects = 30, bench_reps = 1000;
  auto* bench = app.add_subcommand("bench", "time batched vs unbatched matching");
  bench->add_option("--objects", bench_objects, "objects per side (K = N)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_reps, "timed repetitions per path")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    Output out(out_path);
    if (*score) {
      auto samples = open_input(samples_path);
      auto rollouts = open_input(rollouts_path);
      return cli::cmd_score(samples, rollouts, out.stream(), std::cerr, score_opts);
    }
    if (*eval) {
      auto preds = open_input(preds_path);
      auto gts_file = open_input(gts_path);
      std::stringstream gts;
      gts << gts_file.rdbuf();
      const TaskType task = task_name.empty() ? infer_task(gts.str()) : *parse_task_type(task_name);
      return cli::cmd_eval(preds, gts, task, out.stream(), std::cerr);
    }
    if (*prep) {
      auto annotations = open_input(annotations_path);
      return cli::cmd_prep(masks_dir, annotations, strict, out.stream(), std::cerr);
    }
    if (*sim) {
      auto samples = open_input(sim_samples);
      return cli::cmd_simulate(samples, sigmas, sim_cfg, sim_thr, out.stream(), std::cerr);
    }
    if (*bench) return cli::cmd_bench(bench_objects, bench_reps, out.stream(), std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitDataError;
  }
  return cli::kExitUsage;
}
