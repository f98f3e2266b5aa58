#include "visrl/data_prep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>

#include "visrl/errors.hpp"

namespace visrl {

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::detection: return "detection";
    case TaskType::segmentation: return "segmentation";
    case TaskType::counting: return "counting";
  }
  return "unknown";
}

std::optional<TaskType> parse_task_type(std::string_view name) {
  if (name == "detection") return TaskType::detection;
  if (name == "segmentation") return TaskType::segmentation;
  if (name == "counting") return TaskType::counting;
  return std::nullopt;
}

MaskGrid::MaskGrid(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width_ == 0 || height_ == 0) throw InputError("mask dimensions must be at least 1x1");
  if (bits_.size() != width_ * height_) {
    throw InputError("mask has " + std::to_string(bits_.size()) + " cells, expected " +
                     std::to_string(width_ * height_));
  }
}

MaskGrid::MaskGrid(std::size_t width, std::size_t height)
    : MaskGrid(width, height, std::vector<std::uint8_t>(width * height, 0)) {}

std::size_t MaskGrid::foreground_count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

Box mask_to_bbox(const MaskGrid& mask) {
  std::size_t min_x = std::numeric_limits<std::size_t>::max(), min_y = min_x;
  std::size_t max_x = 0, max_y = 0;
  bool any = false;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      any = true;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (!any) throw EmptyMaskError("mask has no foreground pixel");
  return {static_cast<double>(min_x), static_cast<double>(min_y), static_cast<double>(max_x),
          static_cast<double>(max_y)};
}

namespace {

// round(sum / count) with ties going down, exact in integers.
std::uint64_t round_mean_ties_down(std::uint64_t sum, std::uint64_t count) {
  // ceil((2 sum - count) / (2 count))
  if (2 * sum <= count) return 0;
  const std::uint64_t num = 2 * sum - count;
  const std::uint64_t den = 2 * count;
  return (num + den - 1) / den;
}

}  // namespace

Point mask_to_point(const MaskGrid& mask) {
  std::uint64_t sx = 0, sy = 0, count = 0;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x;
      sy += y;
      ++count;
    }
  }
  if (count == 0) throw EmptyMaskError("mask has no foreground pixel");
  return {static_cast<double>(round_mean_ties_down(sx, count)),
          static_cast<double>(round_mean_ties_down(sy, count))};
}

SampleFragment merge_objects(std::span<const ObjectAnnotation> objects) {
  if (objects.empty()) throw InputError("merge_objects needs at least one object");
  SampleFragment out;
  out.instances.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (i) out.query += " and ";
    out.query += objects[i].text;
    out.instances.push_back({objects[i].bbox, objects[i].point});
  }
  return out;
}

void validate_sample(const Sample& sample) {
  if (sample.image_width <= 0 || sample.image_height <= 0) {
    throw InputError("image dimensions must be positive");
  }
  const double w = sample.image_width;
  const double h = sample.image_height;
  auto inside = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && x >= 0.0 && x <= w && y >= 0.0 && y <= h;
  };
  for (std::size_t i = 0; i < sample.gt_instances.size(); ++i) {
    const Instance& g = sample.gt_instances[i];
    if (!inside(g.bbox.x1, g.bbox.y1) || !inside(g.bbox.x2, g.bbox.y2) ||
        !inside(g.point.x, g.point.y)) {
      throw InputError("gt instance " + std::to_string(i) + " lies outside the image");
    }
  }
}

std::span<const std::string_view> coco_category_names() {
  static constexpr std::array<std::string_view, 91> kNames = {
      "",           "person",        "bicycle",      "car",           "motorcycle",
      "airplane",   "bus",           "train",        "truck",         "boat",
      "traffic light", "fire hydrant", "",           "stop sign",     "parking meter",
      "bench",      "bird",          "cat",          "dog",           "horse",
      "sheep",      "cow",           "elephant",     "bear",          "zebra",
      "giraffe",    "",              "backpack",     "umbrella",      "",
      "",           "handbag",       "tie",          "suitcase",      "frisbee",
      "skis",       "snowboard",     "sports ball",  "kite",          "baseball bat",
      "baseball glove", "skateboard", "surfboard",   "tennis racket", "bottle",
      "",           "wine glass",    "cup",          "fork",          "knife",
      "spoon",      "bowl",          "banana",       "apple",         "sandwich",
      "orange",     "broccoli",      "carrot",       "hot dog",       "pizza",
      "donut",      "cake",          "chair",        "couch",         "potted plant",
      "bed",        "",              "dining table", "",              "",
      "toilet",     "",              "tv",           "laptop",        "mouse",
      "remote",     "keyboard",      "cell phone",   "microwave",     "oven",
      "toaster",    "sink",          "refrigerator", "",              "book",
      "clock",      "vase",          "scissors",     "teddy bear",    "hair drier",
      "toothbrush",
  };
  return kNames;
}

std::vector<std::string> numeral_spellings(std::size_t n) {
  static constexpr std::array<std::string_view, 20> kUnits = {
      "zero",    "one",     "two",       "three",    "four",     "five",    "six",
      "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
      "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
  static constexpr std::array<std::string_view, 10> kTens = {
      "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

  std::vector<std::string> out{std::to_string(n)};
  if (n < 20) {
    out.emplace_back(kUnits[n]);
  } else if (n < 100) {
    const std::string tens(kTens[n / 10]);
    if (n % 10 == 0) {
      out.push_back(tens);
    } else {
      out.push_back(tens + "-" + std::string(kUnits[n % 10]));
      out.push_back(tens + std::string(kUnits[n % 10]));
    }
  }
  return out;
}

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

std::string remove_count_numerals(const std::string& query, std::size_t count) {
  const std::vector<std::string> spellings = numeral_spellings(count);
  const std::vector<std::string_view> tokens = split_whitespace(query);
  std::vector<std::string> kept;
  bool removed = false;
  for (const std::string_view token : tokens) {
    std::size_t b = 0, e = token.size();
    while (b < e && is_ascii_punct(token[b])) ++b;
    while (e > b && is_ascii_punct(token[e - 1])) --e;
    const std::string core = lowercase(token.substr(b, e - b));
    if (core.empty() || std::find(spellings.begin(), spellings.end(), core) == spellings.end()) {
      kept.emplace_back(token);
      continue;
    }
    removed = true;
    const std::string leftover =
        std::string(token.substr(0, b)) + std::string(token.substr(e));
    if (leftover.empty()) continue;
    if (kept.empty()) {
      kept.push_back(leftover);
    } else {
      kept.back() += leftover;
    }
  }
  if (!removed) return query;

  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += ' ';
    out += kept[i];
  }
  return out;
}

std::optional<std::size_t> parse_class_id(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty() || s.size() > 9) return std::nullopt;
  std::size_t id = 0;
  for (const char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    id = id * 10 + static_cast<std::size_t>(c - '0');
  }
  return id;
}

}  // namespace

Sample sanitize_annotation(Sample sample, std::span<const std::string_view> class_names) {
  switch (sample.task_type) {
    case TaskType::counting:
      sample.query = remove_count_numerals(sample.query, sample.gt_count());
      break;
    case TaskType::detection:
      if (const auto id = parse_class_id(sample.query);
          id && *id < class_names.size() && !class_names[*id].empty()) {
        sample.query = std::string(class_names[*id]);
      }
      break;
    case TaskType::segmentation:
      break;
  }
  return sample;
}

}  // namespace visrl
