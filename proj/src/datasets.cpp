#include "cloze/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "cloze/error.hpp"

namespace cloze::datasets {

using nlohmann::json;

namespace {

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// Unbiased integer in [0, bound) by rejection.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

QAInstance multiple_choice_from_json(const json& j, std::size_t lineno) {
  QAInstance inst;
  inst.id = j.value("id", "line-" + std::to_string(lineno));
  const json& q = j.at("question");
  inst.question = q.at("stem").get<std::string>();
  std::vector<std::pair<std::string, std::string>> choices;
  for (const auto& c : q.at("choices"))
    choices.emplace_back(c.at("label").get<std::string>(), c.at("text").get<std::string>());
  std::sort(choices.begin(), choices.end());
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const std::string expected(1, static_cast<char>('A' + i));
    if (choices[i].first != expected)
      throw DataError("unknown or missing choice label '" + choices[i].first + "'", lineno);
    inst.candidates.push_back(choices[i].second);
  }
  if (j.contains("answerKey")) {
    const auto key = j["answerKey"].get<std::string>();
    if (key.size() != 1 || key[0] < 'A' || static_cast<std::size_t>(key[0] - 'A') >= inst.candidates.size())
      throw DataError("answerKey '" + key + "' names no choice", lineno);
    inst.gold = static_cast<std::size_t>(key[0] - 'A');
  }
  return inst;
}

}  // namespace

std::vector<QAInstance> read_multiple_choice_jsonl(std::istream& in) {
  std::vector<QAInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      QAInstance inst = multiple_choice_from_json(json::parse(line), lineno);
      inst.validate();
      out.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed record: ") + e.what(), lineno);
    } catch (const DataError& e) {
      if (e.line()) throw;
      throw DataError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<QAInstance> load_commonsenseqa(const std::filesystem::path& path) {
  auto in = open(path);
  return read_multiple_choice_jsonl(in);
}

std::vector<QAInstance> load_openbookqa(const std::filesystem::path& path) {
  auto in = open(path);
  return read_multiple_choice_jsonl(in);
}

std::vector<QAInstance> read_socialiqa(std::istream& in, std::istream* labels, const std::string& id_prefix) {
  std::vector<QAInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      const json j = json::parse(line);
      QAInstance inst;
      inst.id = id_prefix + "-" + std::to_string(lineno);
      inst.context = j.at("context").get<std::string>();
      inst.question = j.at("question").get<std::string>();
      for (const char* key : {"answerA", "answerB", "answerC"}) inst.candidates.push_back(j.at(key).get<std::string>());
      if (labels) {
        std::string label;
        do {
          if (!std::getline(*labels, label)) throw DataError("label file ends before the data file", lineno);
        } while (blank(label));
        std::size_t value = 0;
        try {
          value = std::stoul(label);
        } catch (const std::exception&) {
          throw DataError("bad label '" + label + "'", lineno);
        }
        if (value < 1 || value > inst.candidates.size()) throw DataError("label out of range '" + label + "'", lineno);
        inst.gold = value - 1;
      }
      inst.validate();
      out.push_back(std::move(inst));
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed record: ") + e.what(), lineno);
    } catch (const DataError& e) {
      if (e.line()) throw;
      throw DataError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<QAInstance> load_socialiqa(const std::filesystem::path& path, const std::filesystem::path& labels) {
  auto in = open(path);
  if (labels.empty()) return read_socialiqa(in, nullptr);
  auto lab = open(labels);
  return read_socialiqa(in, &lab);
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[bounded(rng, i)]);
  return idx;
}

Split split_csqa(std::span<const QAInstance> published_train, std::span<const QAInstance> published_dev,
                 std::uint64_t seed) {
  if (published_train.size() != kCsqaPublishedTrain || published_dev.size() != kCsqaDev)
    throw DataError("CommonsenseQA split expects " + std::to_string(kCsqaPublishedTrain) + " train and " +
                    std::to_string(kCsqaDev) + " dev instances, got " + std::to_string(published_train.size()) +
                    " and " + std::to_string(published_dev.size()));
  Split s;
  s.seed = seed;
  const auto order = seeded_permutation(published_train.size(), seed);
  s.train.reserve(kCsqaTrain);
  s.test.reserve(kCsqaTest);
  for (std::size_t k = 0; k < order.size(); ++k)
    (k < kCsqaTrain ? s.train : s.test).push_back(published_train[order[k]]);
  s.dev.assign(published_dev.begin(), published_dev.end());
  return s;
}

std::vector<QAInstance> sample_fewshot(std::span<const QAInstance> train, std::size_t k, std::uint64_t seed) {
  if (k > train.size())
    throw DataError("cannot sample " + std::to_string(k) + " of " + std::to_string(train.size()) + " instances");
  const auto order = seeded_permutation(train.size(), seed);
  std::vector<QAInstance> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(train[order[i]]);
  return out;
}

Manifest manifest_of(const Split& split) {
  Manifest m;
  for (const auto& i : split.train) m.train.push_back(i.id);
  for (const auto& i : split.dev) m.dev.push_back(i.id);
  for (const auto& i : split.test) m.test.push_back(i.id);
  return m;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  auto section = [&](const char* name, const std::vector<std::string>& ids) {
    out << '[' << name << "]\n";
    for (const auto& id : ids) out << id << '\n';
  };
  section("train", m.train);
  section("dev", m.dev);
  section("test", m.test);
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::vector<std::string>* current = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    if (line == "[train]") {
      current = &m.train;
    } else if (line == "[dev]") {
      current = &m.dev;
    } else if (line == "[test]") {
      current = &m.test;
    } else if (!current) {
      throw DataError("manifest id before any section header", lineno);
    } else {
      current->push_back(line);
    }
  }
  return m;
}

double accuracy(std::span<const Choice> choices, std::span<const QAInstance> gold) {
  std::unordered_map<std::string, const QAInstance*> by_id;
  for (const auto& g : gold) by_id.emplace(g.id, &g);
  if (choices.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& c : choices) {
    auto it = by_id.find(c.id);
    if (it == by_id.end()) throw DataError("prediction for unknown instance '" + c.id + "'");
    if (!it->second->gold) throw DataError("instance '" + c.id + "' has no gold label");
    if (*it->second->gold == c.index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(choices.size());
}

double accuracy(std::span<const scoring::Prediction> predictions, std::span<const QAInstance> gold) {
  std::vector<Choice> choices;
  choices.reserve(predictions.size());
  for (const auto& p : predictions) choices.push_back({p.id, static_cast<std::size_t>(p.argmax)});
  return accuracy(choices, gold);
}

std::vector<ClozePair> read_cloze_pairs(std::istream& in) {
  std::vector<ClozePair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("cloze pair lacks a TAB separator", lineno);
    ClozePair p{line.substr(0, tab), line.substr(tab + 1)};
    const auto masks = count_masks(std::string_view(p.cloze));
    if (masks != 1) throw DataError("cloze has " + std::to_string(masks) + " [MASK] tokens, expected 1", lineno);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ClozePair> load_cloze_pairs(const std::filesystem::path& path) {
  auto in = open(path);
  return read_cloze_pairs(in);
}

}  // namespace cloze::datasets
