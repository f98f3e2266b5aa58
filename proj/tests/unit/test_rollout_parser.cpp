#include <doctest.h>

#include <random>
#include <string>

#include "visrl/rollout_parser.hpp"

using namespace visrl;

namespace {

TagError tag_error_of(std::string_view text) {
  auto r = extract_blocks(text);
  REQUIRE(std::holds_alternative<TagError>(r));
  return std::get<TagError>(r);
}

SchemaError schema_error_of(std::string_view text) {
  auto r = parse_answer(text);
  REQUIRE(std::holds_alternative<SchemaError>(r));
  return std::get<SchemaError>(r);
}

}  // namespace

TEST_CASE("extract_blocks accepts the minimal well-formed rollout") {
  auto r = extract_blocks("<think>a</think><answer>[]</answer>");
  REQUIRE(std::holds_alternative<Blocks>(r));
  CHECK(std::get<Blocks>(r).think == "a");
  CHECK(std::get<Blocks>(r).answer_raw == "[]");
}

TEST_CASE("extract_blocks trims block contents and ignores surrounding text") {
  auto r = extract_blocks("Sure!\n<think>\n  look left \n</think>\n\n<answer> [] </answer> bye");
  REQUIRE(std::holds_alternative<Blocks>(r));
  CHECK(std::get<Blocks>(r).think == "look left");
  CHECK(std::get<Blocks>(r).answer_raw == "[]");
}

TEST_CASE("extract_blocks tag errors") {
  CHECK(tag_error_of("<answer>[]</answer><think>a</think>") == TagError::wrong_order);
  CHECK(tag_error_of("<think>x</think><think>y</think><answer>[]</answer>") ==
        TagError::duplicate_tags);
  CHECK(tag_error_of("<think>x</think><answer>[]</answer><answer>[]</answer>") ==
        TagError::duplicate_tags);
  CHECK(tag_error_of("") == TagError::no_think);
  CHECK(tag_error_of("just text") == TagError::no_think);
  CHECK(tag_error_of("<answer>[]</answer>") == TagError::no_think);
  CHECK(tag_error_of("<think>only thinking</think>") == TagError::no_answer);
  CHECK(tag_error_of("<think>a<answer>[]</think></answer>") == TagError::interleaved);
  CHECK(tag_error_of("</think>a<think><answer>[]</answer>") == TagError::interleaved);
  CHECK(tag_error_of("<think>a</think> so: <answer>[]</answer>") == TagError::interleaved);
}

TEST_CASE("extract_blocks is case sensitive") {
  CHECK(tag_error_of("<THINK>a</THINK><answer>[]</answer>") == TagError::no_think);
  CHECK(tag_error_of("<think >a</think><answer>[]</answer>") == TagError::no_think);
}

TEST_CASE("parse_answer reads the answer template") {
  auto r = parse_answer(R"([{"bbox_2d":[10,100,200,210],"point_2d":[30,110]}])");
  REQUIRE(std::holds_alternative<std::vector<Instance>>(r));
  const auto& v = std::get<std::vector<Instance>>(r);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == Instance{{10, 100, 200, 210}, {30, 110}});
}

TEST_CASE("parse_answer keeps array order and accepts whitespace and floats") {
  auto r = parse_answer(R"( [ {"point_2d": [1.5, 2], "bbox_2d": [0, 0, 3.25, 4]},
                              {"bbox_2d": [5,6,7,8], "point_2d": [6,7]} ] )");
  REQUIRE(std::holds_alternative<std::vector<Instance>>(r));
  const auto& v = std::get<std::vector<Instance>>(r);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == Instance{{0, 0, 3.25, 4}, {1.5, 2}});
  CHECK(v[1] == Instance{{5, 6, 7, 8}, {6, 7}});
}

TEST_CASE("parse_answer empty array is valid") {
  auto r = parse_answer("[]");
  REQUIRE(std::holds_alternative<std::vector<Instance>>(r));
  CHECK(std::get<std::vector<Instance>>(r).empty());
}

TEST_CASE("parse_answer schema errors") {
  CHECK(schema_error_of(R"([{"bbox_2d":[10,100,200,210]}])") == SchemaError::missing_key);
  CHECK(schema_error_of("the box is at 1,2,3,4") == SchemaError::not_json);
  CHECK(schema_error_of("") == SchemaError::not_json);
  // The prompt template itself drops a colon; strict JSON rejects it.
  CHECK(schema_error_of(R"([{"bbox_2d": [10,100,200,210], "point_2d" [30,110]}])") ==
        SchemaError::not_json);
  CHECK(schema_error_of(R"({"bbox_2d":[1,2,3,4],"point_2d":[1,2]})") == SchemaError::not_array);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,2,3,4],"point_2d":[1,2],"label":"car"}])") ==
        SchemaError::extra_key);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,2,3,4],"point_2d":[1,2],"point_2d":[3,4]}])") ==
        SchemaError::extra_key);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,2,3],"point_2d":[1,2]}])") == SchemaError::wrong_arity);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,2,3,4],"point_2d":[1,2,3]}])") ==
        SchemaError::wrong_arity);
  CHECK(schema_error_of(R"([{"bbox_2d":"1,2,3,4","point_2d":[1,2]}])") ==
        SchemaError::wrong_arity);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,"2",3,4],"point_2d":[1,2]}])") ==
        SchemaError::non_numeric);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,true,3,4],"point_2d":[1,2]}])") ==
        SchemaError::non_numeric);
  CHECK(schema_error_of(R"([{"bbox_2d":[1,2,3,4],"point_2d":[1,null]}])") ==
        SchemaError::non_numeric);
  CHECK(schema_error_of(R"([[1,2,3,4]])") == SchemaError::missing_key);
}

TEST_CASE("parse_rollout status mapping") {
  CHECK(parse_rollout("no tags").status == ParseStatus::missing_tags);
  CHECK_FALSE(parse_rollout("no tags").instances.has_value());
  CHECK(parse_rollout("<think>a</think><answer>nope</answer>").status == ParseStatus::bad_json);
  CHECK(parse_rollout("<think>a</think><answer>{}</answer>").status == ParseStatus::bad_schema);
  const auto ok = parse_rollout("<think>a</think><answer>[]</answer>");
  CHECK(ok.status == ParseStatus::ok);
  REQUIRE(ok.instances.has_value());
  CHECK(ok.instances->empty());
}

TEST_CASE("parse_rollout keeps emitted coordinates uncanonicalized") {
  const auto p = parse_rollout(
      R"(<think>t</think><answer>[{"bbox_2d":[200,210,10,100],"point_2d":[30,110]}]</answer>)");
  REQUIRE(p.status == ParseStatus::ok);
  CHECK((*p.instances)[0].bbox == Box{200, 210, 10, 100});
}

TEST_CASE("canonicalize") {
  CHECK(canonicalize(Instance{{200, 210, 10, 100}, {30, 110}}) ==
        Instance{{10, 100, 200, 210}, {30, 110}});
  CHECK(canonicalize(Instance{{10, 100, 200, 210}, {30, 110}}) ==
        Instance{{10, 100, 200, 210}, {30, 110}});
  CHECK(canonicalize(Instance{{5, 5, 5, 5}, {5, 5}}) == Instance{{5, 5, 5, 5}, {5, 5}});
  CHECK(canonicalize(Instance{{10, 9, 0, 20}, {0, 0}}) == Instance{{0, 9, 10, 20}, {0, 0}});
}

TEST_CASE("canonicalize is idempotent on random boxes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500, 500);
  for (int i = 0; i < 500; ++i) {
    const Instance in{{u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng)}};
    const Instance once = canonicalize(in);
    CHECK(canonicalize(once) == once);
    CHECK(once.bbox.x1 <= once.bbox.x2);
    CHECK(once.bbox.y1 <= once.bbox.y2);
    CHECK(once.point == in.point);
  }
}

TEST_CASE("format_number") {
  CHECK(format_number(10) == "10");
  CHECK(format_number(0.1234567) == "0.123457");
  CHECK(format_number(123.456789) == "123.457");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-7) == "1e-07");
}

TEST_CASE("serialize_answer canonical bytes") {
  const std::vector<Instance> v{{{10, 100, 200, 210}, {30, 110}}, {{225, 296, 706, 786}, {302, 410}}};
  CHECK(serialize_answer(v) ==
        R"([{"bbox_2d":[10,100,200,210],"point_2d":[30,110]},{"bbox_2d":[225,296,706,786],"point_2d":[302,410]}])");
  CHECK(serialize_answer({}) == "[]");
}

TEST_CASE("serialized instances parse back to the identical list") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2000, 2000);
  for (int round = 0; round < 200; ++round) {
    std::vector<Instance> v(rng() % 5);
    for (auto& inst : v) {
      inst = {{round_to_wire(u(rng)), round_to_wire(u(rng)), round_to_wire(u(rng)),
               round_to_wire(u(rng))},
              {round_to_wire(u(rng)), round_to_wire(u(rng))}};
    }
    auto parsed = parse_answer(serialize_answer(v));
    REQUIRE(std::holds_alternative<std::vector<Instance>>(parsed));
    CHECK(std::get<std::vector<Instance>>(parsed) == v);
  }
}

TEST_CASE("parser is total over random byte strings") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "<>/thinkanswer[]{}\":,.0123456789 -e\n\xff\x80";
  const std::string pieces[] = {"<think>", "</think>", "<answer>", "</answer>", "\"bbox_2d\"",
                                "\"point_2d\"", "[", "]", "{", "}", ":", ","};
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int len = static_cast<int>(rng() % 60);
    for (int k = 0; k < len; ++k) {
      s += (rng() % 3 == 0) ? pieces[rng() % std::size(pieces)]
                            : std::string(1, alphabet[rng() % alphabet.size()]);
    }
    const ParsedRollout p = parse_rollout(s);
    CHECK((p.status == ParseStatus::ok) == p.instances.has_value());
  }
}
