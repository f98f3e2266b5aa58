// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "visrl/bench.hpp"
#include "visrl/geometry.hpp"
#include "visrl/grpo.hpp"
#include "visrl/matching.hpp"
#include "visrl/reward.hpp"
#include "visrl/rollout_parser.hpp"
#include "visrl/simulate.hpp"

using namespace visrl;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void matching_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  const Thresholds thr;
  double worst = 0.0;
  int bad = 0;
  for (int round = 0; round < 500; ++round) {
    const std::size_t k = rng() % 7, n = rng() % 7;
    std::vector<Instance> gts(n), preds(k);
    for (auto& g : gts) g = oracle::random_instance(rng);
    // Half the cases jitter ground truths so every cost level occurs.
    const bool near = round % 2 == 0;
    for (auto& p : preds) {
      p = (near && n) ? oracle::perturb(gts[rng() % n], rng, 15.0) : oracle::random_instance(rng);
    }
    const double got = accuracy_reward(preds, gts, thr).accuracy_reward;
    const double want = oracle::accuracy_reward(preds, gts, thr);
    worst = std::max(worst, std::abs(got - want));
    bad += std::abs(got - want) > 1e-12;
  }
  const double secs = seconds_since(t0);
  report(bad == 0 && secs < 10.0, "matching_oracle",
         "500 cases K,N<=6, max|diff|=" + fmt("%.3g", worst) + " (tol 1e-12), " +
             fmt("%.3f", secs) + " s (limit 10 s)");
}

void bench_speedup() {
  const BenchReport r = bench_matching(30, 1000);
  report(r.results_agree && r.speedup >= 2.0, "batch_speedup",
         "objects=30 reps=1000 batch=" + fmt("%.3g", r.batch_seconds) +
             " s naive=" + fmt("%.3g", r.naive_seconds) + " s speedup=" + fmt("%.2f", r.speedup) +
             "x (floor 2x), results_agree=" + (r.results_agree ? "true" : "false"));
}

void advantage_normalization() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  double worst_mean = 0.0, worst_std = 0.0;
  int groups = 0;
  while (groups < 1000) {
    std::vector<double> r(2 + rng() % 15);
    for (auto& x : r) x = (rng() % 3 == 0) ? std::round(u(rng)) : u(rng);
    if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) continue;
    ++groups;
    const auto a = group_advantages(r);
    double m = 0.0;
    for (double x : a) m += x;
    m /= static_cast<double>(a.size());
    double v = 0.0;
    for (double x : a) v += (x - m) * (x - m);
    const double sd = std::sqrt(v / static_cast<double>(a.size()));
    worst_mean = std::max(worst_mean, std::abs(m));
    worst_std = std::max(worst_std, std::abs(sd - 1.0));
  }
  bool zeros = true;
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> same(1 + rng() % 16, u(rng));
    for (double x : group_advantages(same)) zeros = zeros && x == 0.0;
  }
  report(worst_mean < 1e-9 && worst_std < 1e-9 && zeros, "advantage_normalization",
         "1000 groups G in [2,16], max|mean|=" + fmt("%.3g", worst_mean) +
             " max|popstd-1|=" + fmt("%.3g", worst_std) + " (tol 1e-9), all-equal groups zero=" +
             (zeros ? "true" : "false"));
}

std::string random_rollout(std::mt19937_64& rng, const std::vector<Instance>& gts) {
  static const std::string pieces[] = {"<think>", "</think>", "<answer>", "</answer>", "[", "]",
                                       "{", "}", "\"bbox_2d\"", "\"point_2d\"", ":", ",", "1",
                                       "-3.5", "1e400", "null", " ", ".", "\n", "The car. "};
  switch (rng() % 4) {
    case 0: {  // arbitrary bytes
      std::string s(rng() % 80, '\0');
      for (char& c : s) c = static_cast<char>(rng() % 256);
      return s;
    }
    case 1: {  // tag and JSON fragments
      std::string s;
      for (std::size_t i = rng() % 30; i > 0; --i) s += pieces[rng() % std::size(pieces)];
      return s;
    }
    default: {  // well formed, possibly mutated
      std::vector<Instance> preds(rng() % 8);
      for (auto& p : preds) {
        p = (!gts.empty() && rng() % 2) ? oracle::perturb(gts[rng() % gts.size()], rng, 20.0)
                                        : oracle::random_instance(rng);
        if (rng() % 5 == 0) std::swap(p.bbox.x1, p.bbox.x2);
      }
      std::string think = "Looking at the image. ";
      if (rng() % 3 == 0) think += "Looking at the image. I see it.";
      std::string s = "<think>" + think + "</think><answer>" + serialize_answer(preds) + "</answer>";
      if (rng() % 3 == 0 && !s.empty()) {
        const std::size_t at = rng() % s.size();
        s[at] = pieces[rng() % std::size(pieces)][0];
      }
      return s;
    }
  }
}

void reward_bounds() {
  std::mt19937_64 rng(1005);
  int bad = 0, crashes = 0;
  double max_total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<Instance> gts(rng() % 7);
    for (auto& g : gts) g = oracle::random_instance(rng);
    const std::string text = random_rollout(rng, gts);
    try {
      const RewardBreakdown r = score_rollout(text, gts);
      const auto binary = [](double x) { return x == 0.0 || x == 1.0; };
      const bool ok = binary(r.format.thinking) && binary(r.format.answer_format) &&
                      binary(r.format.non_repeat) && r.accuracy() >= 0.0 && r.accuracy() <= 3.0 &&
                      r.total >= 0.0 && r.total <= 6.0 &&
                      std::abs(r.total - (r.format.thinking + r.format.answer_format +
                                          r.format.non_repeat + r.accuracy())) <= 1e-12;
      bad += !ok;
      max_total = std::max(max_total, r.total);
    } catch (...) {
      ++crashes;
    }
  }
  report(bad == 0 && crashes == 0, "reward_bounds",
         "10000 fuzzed rollouts, out-of-range=" + std::to_string(bad) +
             " crashes=" + std::to_string(crashes) + " max total=" + fmt("%.4g", max_total));
}

void threshold_boundary() {
  const Instance gt{{0, 0, 10, 10}, {5, 5}};
  const Instance at{{0, 0, 5, 10}, {5, 5}};
  const Instance above{{0, 0, 5 + 1e-8, 10}, {5, 5}};
  const double iou_at = iou(at.bbox, gt.bbox), iou_above = iou(above.bbox, gt.bbox);
  const std::vector<Instance> gts{gt};
  const double r_at = accuracy_reward(std::vector<Instance>{at}, gts).iou_reward;
  const double r_above = accuracy_reward(std::vector<Instance>{above}, gts).iou_reward;
  const bool ok = iou_at == 0.5 && std::abs(iou_above - (0.5 + 1e-9)) < 1e-15 && r_at == 0.0 &&
                  r_above == 1.0;
  report(ok, "threshold_boundary",
         "IoU=" + fmt("%.17g", iou_at) + " indicator=" + fmt("%g", r_at) +
             "; IoU=" + fmt("%.17g", iou_above) + " indicator=" + fmt("%g", r_above));
}

void parser_round_trip() {
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Instance> v(rng() % 8);
    auto coord = [&]() {
      switch (rng() % 4) {
        case 0: return std::round(u(rng));
        case 1: return u(rng) * 1e6;
        case 2: return u(rng) * 1e-6;
        default: return u(rng);
      }
    };
    for (auto& inst : v) inst = {{coord(), coord(), coord(), coord()}, {coord(), coord()}};
    const std::string first = serialize_answer(v);
    const auto parsed = parse_answer(first);
    if (!std::holds_alternative<std::vector<Instance>>(parsed)) {
      ++bad;
      continue;
    }
    bad += serialize_answer(std::get<std::vector<Instance>>(parsed)) != first;
  }
  report(bad == 0, "parser_round_trip",
         "1000 random answers, byte mismatches=" + std::to_string(bad));
}

void simulator_monotonicity() {
  std::mt19937_64 rng(1009);
  std::uniform_real_distribution<double> u(0.0, 1000.0), side(20.0, 300.0);
  std::vector<Sample> samples(20);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Sample& s = samples[i];
    s.sample_id = "sim" + std::to_string(i);
    s.image_width = s.image_height = 1000;
    s.query = "objects";
    s.gt_instances.resize(1 + rng() % 6);
    for (auto& g : s.gt_instances) {
      const double w = side(rng), h = side(rng);
      const double x = std::min(u(rng), 1000.0 - w), y = std::min(u(rng), 1000.0 - h);
      g = {{x, y, x + w, y + h}, {x + w / 2, y + h / 2}};
    }
  }
  SimConfig cfg;
  cfg.group_size = 8;
  cfg.groups = 10;  // 20 samples x 10 = 200 groups
  cfg.drop_prob = 0.0;
  cfg.seed = 42;

  const double ladder[] = {0.0, 5.0, 20.0, 60.0};
  std::vector<double> means;
  std::size_t total_groups = 0;
  bool argmax_ok = true;
  for (const double sigma : ladder) {
    cfg.noise_sigma = sigma;
    double sum = 0.0;
    std::size_t n = 0, groups = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (const SimGroup& g : simulate(samples[i], cfg, {}, i)) {
        ++groups;
        std::vector<double> totals;
        for (const auto& r : g.score.rollouts) {
          sum += r.accuracy();
          ++n;
          totals.push_back(r.total);
        }
        const bool all_equal =
            std::all_of(totals.begin(), totals.end(), [&](double t) { return t == totals[0]; });
        if (!all_equal) {
          const auto& a = g.score.advantages;
          argmax_ok = argmax_ok && (std::max_element(a.begin(), a.end()) - a.begin() ==
                                    std::max_element(totals.begin(), totals.end()) - totals.begin());
        }
      }
    }
    total_groups = groups;
    means.push_back(sum / static_cast<double>(n));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) decreasing = decreasing && means[i] < means[i - 1];
  std::string detail = "groups=" + std::to_string(total_groups) + " G=8 mean accuracy";
  for (std::size_t i = 0; i < means.size(); ++i) {
    detail += " s" + fmt("%g", ladder[i]) + "=" + fmt("%.6f", means[i]);
  }
  detail += std::string(" argmax_consistent=") + (argmax_ok ? "true" : "false");
  report(total_groups == 200 && means[0] == 3.0 && decreasing && argmax_ok, "simulator_monotonicity",
         detail);
}

void ap_oracle() {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  double worst = 0.0;
  int coco_violations = 0;
  for (int round = 0; round < 200; ++round) {
    GroundTruthBoxes gts;
    std::vector<ScoredPrediction> preds;
    const std::size_t ng = 1 + rng() % 5, np = rng() % 6;
    const bool two_samples = rng() % 2;
    std::vector<std::string> ids{"a"};
    if (two_samples) ids.push_back("b");
    for (std::size_t j = 0; j < ng; ++j) gts[ids[rng() % ids.size()]].push_back(oracle::random_box(rng, 200.0));
    for (std::size_t i = 0; i < np; ++i) {
      const std::string& id = ids[rng() % ids.size()];
      const auto it = gts.find(id);
      Box b = (it != gts.end() && rng() % 3) ? oracle::perturb({it->second[rng() % it->second.size()], {}},
                                                                rng, 10.0).bbox
                                             : oracle::random_box(rng, 200.0);
      preds.push_back({id, b, score(rng)});
    }
    for (const double thr : {0.5, 0.75}) {
      worst = std::max(worst, std::abs(ap_at_iou(preds, gts, thr) - oracle::ap_threshold_sweep(preds, gts, thr)));
    }
    coco_violations += coco_ap(preds, gts) > ap_at_iou(preds, gts, 0.5);
  }
  report(worst <= 1e-9 && coco_violations == 0, "ap_oracle",
         "200 cases <=5 preds <=5 gts, max|diff|=" + fmt("%.3g", worst) +
             " (tol 1e-9), coco_ap>ap50 cases=" + std::to_string(coco_violations));
}

void kl_estimator() {
  std::mt19937_64 rng(1013);
  std::uniform_real_distribution<double> lp(-50.0, 0.0);
  int negative = 0, wrong_zero = 0, equal_pairs = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = lp(rng);
    const double b = (i % 10 == 0) ? a : lp(rng);
    equal_pairs += a == b;
    const double kl = kl_estimate({1.0, a, b});
    negative += kl < 0.0;
    wrong_zero += (kl <= 1e-12) != (a == b);
  }
  report(negative == 0 && wrong_zero == 0, "kl_estimator",
         "10000 pairs (" + std::to_string(equal_pairs) + " equal), negative=" +
             std::to_string(negative) + " zero-iff-equal violations=" + std::to_string(wrong_zero));
}

}  // namespace

int main() {
  matching_oracle();
  bench_speedup();
  advantage_normalization();
  reward_bounds();
  threshold_boundary();
  parser_round_trip();
  simulator_monotonicity();
  ap_oracle();
  kl_estimator();
  std::printf("%s: %d failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
