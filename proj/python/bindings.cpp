#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <variant>
#include <vector>

#include "visrl/errors.hpp"
#include "visrl/grpo.hpp"
#include "visrl/reward.hpp"
#include "visrl/rollout_parser.hpp"

namespace py = pybind11;
using namespace visrl;

namespace {

constexpr const char* kApiVersion = "1.0.0";

struct InvalidEncoding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

// str or bytes -> UTF-8 std::string; anything undecodable raises InvalidEncoding.
std::string rollout_text(const py::handle& obj) {
  if (py::isinstance<py::bytes>(obj)) {
    std::string s = obj.cast<std::string>();
    if (!valid_utf8(s)) throw InvalidEncoding("rollout text is not valid UTF-8");
    return s;
  }
  if (py::isinstance<py::str>(obj)) {
    Py_ssize_t size = 0;
    const char* data = PyUnicode_AsUTF8AndSize(obj.ptr(), &size);
    if (!data) {
      PyErr_Clear();
      throw InvalidEncoding("rollout text cannot be encoded as UTF-8");
    }
    return std::string(data, static_cast<std::size_t>(size));
  }
  throw py::type_error("rollout text must be str or bytes");
}

std::vector<double> numbers(const py::handle& obj, std::size_t n, const char* what) {
  auto v = obj.cast<std::vector<double>>();
  if (v.size() != n) {
    throw py::value_error(std::string(what) + " must have " + std::to_string(n) + " numbers");
  }
  return v;
}

// Accepts {"bbox_2d": [4], "point_2d": [2]} or a flat [x1, y1, x2, y2, px, py].
Instance gt_instance(const py::handle& obj) {
  Instance inst;
  if (py::isinstance<py::dict>(obj)) {
    const auto d = obj.cast<py::dict>();
    if (!d.contains("bbox_2d") || !d.contains("point_2d")) {
      throw py::value_error("ground truth needs \"bbox_2d\" and \"point_2d\"");
    }
    const auto b = numbers(d["bbox_2d"], 4, "bbox_2d");
    const auto p = numbers(d["point_2d"], 2, "point_2d");
    inst = {{b[0], b[1], b[2], b[3]}, {p[0], p[1]}};
  } else {
    const auto f = numbers(obj, 6, "ground truth");
    inst = {{f[0], f[1], f[2], f[3]}, {f[4], f[5]}};
  }
  return canonicalize(inst);
}

std::vector<Instance> gt_list(const py::handle& obj) {
  std::vector<Instance> out;
  for (const py::handle item : obj) out.push_back(gt_instance(item));
  return out;
}

Thresholds thresholds(double iou_min, double box_l1_max, double point_l1_max) {
  Thresholds t{iou_min, box_l1_max, point_l1_max};
  t.validate();
  return t;
}

py::dict to_dict(const RewardBreakdown& r) {
  py::dict d;
  d["thinking"] = r.format.thinking;
  d["answer_format"] = r.format.answer_format;
  d["non_repeat"] = r.format.non_repeat;
  d["accuracy"] = r.accuracy();
  d["total"] = r.total;
  py::list pairs;
  for (const auto& [p, g] : r.match.pairs) pairs.append(py::make_tuple(p, g));
  d["pairs"] = pairs;
  return d;
}

using GroupOutcome = std::variant<std::vector<RewardBreakdown>, std::string>;

}  // namespace

PYBIND11_MODULE(_visrl, m) {
  m.doc() = "Reward kernel for multi-object visual perception rollouts.";

  py::register_exception<InvalidEncoding>(m, "InvalidEncodingError", PyExc_ValueError);

  m.def("api_version", [] { return kApiVersion; });

  m.def(
      "score_rollout",
      [](const py::object& text, const py::object& gt, double iou_min, double box_l1_max,
         double point_l1_max) {
        const std::string s = rollout_text(text);
        const std::vector<Instance> gts = gt_list(gt);
        const Thresholds thr = thresholds(iou_min, box_l1_max, point_l1_max);
        RewardBreakdown r;
        {
          py::gil_scoped_release release;
          r = score_rollout(s, gts, thr);
        }
        return to_dict(r);
      },
      py::arg("rollout_text"), py::arg("gt"), py::arg("iou_min") = 0.5,
      py::arg("box_l1_max") = 10.0, py::arg("point_l1_max") = 30.0,
      "Score one rollout. Returns thinking, answer_format, non_repeat, accuracy, total and the "
      "matched (pred, gt) index pairs.");

  m.def(
      "group_advantages",
      [](const std::vector<double>& rewards) { return group_advantages(rewards); },
      py::arg("rewards"), "Group-relative advantages with the population standard deviation.");

  m.def(
      "batch_score",
      [](const py::object& groups, const py::object& gts, double iou_min, double box_l1_max,
         double point_l1_max) {
        const Thresholds thr = thresholds(iou_min, box_l1_max, point_l1_max);
        const auto group_list = py::list(groups);
        const auto gt_lists = py::list(gts);
        if (group_list.size() != gt_lists.size()) {
          throw py::value_error("rollout_groups and gts must have the same length");
        }

        // Convert under the GIL; a bad group becomes an error entry, not an exception.
        std::vector<std::vector<std::string>> texts(group_list.size());
        std::vector<std::vector<Instance>> truths(group_list.size());
        std::vector<GroupOutcome> outcomes(group_list.size());
        for (std::size_t i = 0; i < group_list.size(); ++i) {
          try {
            for (const py::handle t : group_list[i]) texts[i].push_back(rollout_text(t));
            truths[i] = gt_list(gt_lists[i]);
          } catch (const std::exception& e) {
            outcomes[i] = std::string(e.what());
          }
        }

        {
          py::gil_scoped_release release;
          for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (std::holds_alternative<std::string>(outcomes[i])) continue;
            std::vector<RewardBreakdown> scored;
            scored.reserve(texts[i].size());
            for (const auto& t : texts[i]) scored.push_back(score_rollout(t, truths[i], thr));
            outcomes[i] = std::move(scored);
          }
        }

        py::list out;
        for (const auto& o : outcomes) {
          if (const auto* err = std::get_if<std::string>(&o)) {
            py::dict e;
            e["error"] = *err;
            out.append(e);
          } else {
            py::list g;
            for (const auto& r : std::get<std::vector<RewardBreakdown>>(o)) g.append(to_dict(r));
            out.append(g);
          }
        }
        return out;
      },
      py::arg("rollout_groups"), py::arg("gts"), py::arg("iou_min") = 0.5,
      py::arg("box_l1_max") = 10.0, py::arg("point_l1_max") = 30.0,
      "Score many groups without holding the GIL. Each entry of the result is a list of "
      "per-rollout dicts, or {\"error\": message} if that group's inputs were invalid.");
}
