#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "visrl/types.hpp"

namespace visrl {

enum class TaskType { detection, segmentation, counting };

std::string_view to_string(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view name);

// Row-major binary grid; any non-zero byte is foreground.
class MaskGrid {
 public:
  // Throws InputError if a dimension is zero or bits.size() != width * height.
  MaskGrid(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);
  MaskGrid(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t x, std::size_t y, bool on) { bits_[y * width_ + x] = on ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t foreground_count() const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> bits_;
};

// Inclusive extreme pixel indices [min_x, min_y, max_x, max_y]. Throws EmptyMaskError.
Box mask_to_bbox(const MaskGrid& mask);

/// Foreground centroid rounded to the nearest pixel, ties toward the smaller
/// coordinate. Throws EmptyMaskError.
Point mask_to_point(const MaskGrid& mask);

struct ObjectAnnotation {
  std::string text;
  Box bbox;
  Point point;
};

struct SampleFragment {
  std::string query;
  std::vector<Instance> instances;
};

// Joins texts with " and " and concatenates instances, both in input order.
// Throws InputError on an empty list.
SampleFragment merge_objects(std::span<const ObjectAnnotation> objects);

struct Sample {
  std::string sample_id;
  int image_width = 0;
  int image_height = 0;
  std::string query;
  TaskType task_type = TaskType::detection;
  std::vector<Instance> gt_instances;

  std::size_t gt_count() const { return gt_instances.size(); }
};

// Throws InputError unless image dims are positive and every gt box and point
// lies inside [0, width] x [0, height].
void validate_sample(const Sample& sample);

// COCO category names indexed by category id (1..90); unused ids are empty.
std::span<const std::string_view> coco_category_names();

/// Removes label leakage from a query. Counting samples lose standalone
/// numerals (digits or English number words) equal to the ground-truth count;
/// detection samples whose query is a bare class id get the class name from
/// `class_names`. Other queries are returned unchanged. Idempotent.
Sample sanitize_annotation(Sample sample,
                           std::span<const std::string_view> class_names = coco_category_names());

// Spellings of n that count as a numeral for de-leakage ("7", "seven", ...).
std::vector<std::string> numeral_spellings(std::size_t n);

}  // namespace visrl
