#include <doctest.h>

#include <set>
#include <sstream>

#include "cloze/datasets.hpp"
#include "cloze/error.hpp"

using namespace cloze;
using namespace cloze::datasets;

namespace {

std::vector<QAInstance> synthetic(std::size_t n, const std::string& prefix) {
  std::vector<QAInstance> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({prefix + std::to_string(i), "What?", std::nullopt, {"a", "b", "c", "d", "e"}, i % 5});
  return out;
}

std::set<std::string> ids(const std::vector<QAInstance>& v) {
  std::set<std::string> out;
  for (const auto& i : v) out.insert(i.id);
  return out;
}

const char* kCsqaLine =
    R"({"answerKey": "C", "id": "abc", "question": {"question_concept": "x", "choices": [{"label": "B", "text": "bank"}, {"label": "A", "text": "ball"}, {"label": "C", "text": "cave"}, {"label": "D", "text": "desk"}, {"label": "E", "text": "eel"}], "stem": "Where is it?"}})";

}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("CommonsenseQA lines") {
    std::istringstream in(std::string(kCsqaLine) + "\n");
    const auto v = read_multiple_choice_jsonl(in);
    REQUIRE(v.size() == 1);
    CHECK(v[0].id == "abc");
    CHECK(v[0].question == "Where is it?");
    CHECK(v[0].candidates == std::vector<std::string>{"ball", "bank", "cave", "desk", "eel"});
    CHECK(v[0].gold == 2u);

    std::istringstream test_style(
        R"({"id": "t", "question": {"stem": "Why?", "choices": [{"label": "A", "text": "x"}, {"label": "B", "text": "y"}]}})");
    const auto t = read_multiple_choice_jsonl(test_style);
    REQUIRE(t.size() == 1);
    CHECK_FALSE(t[0].gold.has_value());
  }

  TEST_CASE("ingestion errors carry the line number") {
    auto line_of = [](const std::string& text) -> std::size_t {
      std::istringstream in(text);
      try {
        read_multiple_choice_jsonl(in);
      } catch (const DataError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of(std::string(kCsqaLine) + "\n{not json\n") == 2);
    CHECK(line_of(R"({"id":"x","question":{"choices":[]}})") == 1);
    CHECK(
        line_of(
            R"({"id":"x","answerKey":"A","question":{"stem":"s","choices":[{"label":"A","text":"a"},{"label":"Q","text":"b"}]}})") ==
        1);
    CHECK(
        line_of(
            R"({"id":"x","answerKey":"F","question":{"stem":"s","choices":[{"label":"A","text":"a"},{"label":"B","text":"b"}]}})") ==
        1);
  }

  TEST_CASE("SocialIQA with labels") {
    std::istringstream data(
        R"({"context": "Alex went home.", "question": "Why?", "answerA": "tired", "answerB": "hungry", "answerC": "bored"})"
        "\n");
    std::istringstream labels("2\n");
    const auto v = read_socialiqa(data, &labels);
    REQUIRE(v.size() == 1);
    CHECK(v[0].context == std::string("Alex went home."));
    CHECK(v[0].gold == 1u);
  }

  TEST_CASE("CSQA split sizes, disjointness and seed determinism") {
    const auto train = synthetic(kCsqaPublishedTrain, "tr"), dev = synthetic(kCsqaDev, "dev");
    const Split a = split_csqa(train, dev, 13);
    CHECK(a.train.size() == 8500);
    CHECK(a.dev.size() == 1221);
    CHECK(a.test.size() == 1241);
    std::set<std::string> all = ids(a.train);
    const auto test_ids = ids(a.test);
    all.insert(test_ids.begin(), test_ids.end());
    CHECK(all.size() == kCsqaPublishedTrain);
    CHECK(ids(a.dev) == ids(dev));

    const Split again = split_csqa(train, dev, 13);
    CHECK(manifest_of(again) == manifest_of(a));
    const Split other = split_csqa(train, dev, 14);
    CHECK(other.train.size() == 8500);
    CHECK(ids(other.test) != ids(a.test));

    CHECK_THROWS_AS(split_csqa(synthetic(100, "x"), dev, 13), DataError);
  }

  TEST_CASE("manifest round-trip") {
    const Split s = split_csqa(synthetic(kCsqaPublishedTrain, "tr"), synthetic(kCsqaDev, "dev"), 13);
    std::stringstream buf;
    write_manifest(buf, manifest_of(s));
    CHECK(buf.str().starts_with("[train]\n"));
    CHECK(read_manifest(buf) == manifest_of(s));
  }

  TEST_CASE("few-shot sampling") {
    const auto train = synthetic(500, "tr");
    const auto s16 = sample_fewshot(train, 16, 1);
    CHECK(ids(s16).size() == 16);
    CHECK(sample_fewshot(train, 0, 1).empty());
    CHECK(ids(sample_fewshot(train, 16, 1)) == ids(s16));
    CHECK(ids(sample_fewshot(train, 16, 2)) != ids(s16));
    CHECK_THROWS_AS(sample_fewshot(train, 501, 1), DataError);
  }

  TEST_CASE("accuracy") {
    const auto gold = synthetic(4, "q");
    std::vector<Choice> c;
    for (const auto& g : gold) c.push_back({g.id, *g.gold});
    CHECK(accuracy(c, gold) == 1.0);
    for (auto& x : c) x.index = (x.index + 1) % 5;
    CHECK(accuracy(c, gold) == 0.0);
    c[0].index = *gold[0].gold;
    c[1].index = *gold[1].gold;
    c[2].index = *gold[2].gold;
    CHECK(accuracy(c, gold) == 0.75);

    std::vector<Choice> unknown{{"nope", 0}};
    CHECK_THROWS_AS(accuracy(unknown, gold), DataError);
    auto no_gold = gold;
    no_gold[0].gold.reset();
    std::vector<Choice> first{{gold[0].id, 0}};
    CHECK_THROWS_AS(accuracy(first, no_gold), DataError);
  }

  TEST_CASE("cloze pairs validate the single mask") {
    std::istringstream ok("What is it?\tIt is [MASK].\n\n");
    CHECK(read_cloze_pairs(ok).size() == 1);
    auto line_of = [](const std::string& text) -> std::size_t {
      std::istringstream in(text);
      try {
        read_cloze_pairs(in);
      } catch (const DataError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("a?\t[MASK].\nb?\tno mask.\n") == 2);
    CHECK(line_of("a?\t[MASK] [MASK].\n") == 1);
  }
}
