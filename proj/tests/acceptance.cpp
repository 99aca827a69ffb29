// Acceptance run: one [PASS]/[FAIL] line per criterion, mock backend only.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cloze/consistency.hpp"
#include "cloze/datasets.hpp"
#include "cloze/edit_tags.hpp"
#include "cloze/error.hpp"
#include "cloze/rewriter.hpp"
#include "cloze/scoring.hpp"
#include "cloze/treebank.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace cloze;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTreebankSeconds = 5.0;
constexpr double kRewriteSeconds = 2.0;
constexpr double kTaggerSeconds = 10.0;
constexpr double kSuiteSeconds = 60.0;
constexpr double kScoreTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;
constexpr double kShiftTolerance = 1e-12;
const std::string kMaskToken(kMask);

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << " (" << static_cast<long>(ms) << " ms)";
  if (!o.detail.empty()) std::cout << ": " << o.detail;
  std::cout << std::endl;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Standalone re-derivation of the mock scorer and sentence mean, sharing no code with the library.
double oracle_sentence(const Tokens& tokens) {
  long double total = 0;
  for (const auto& tok : tokens) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : tok) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    total += -(0.5L + static_cast<long double>(h % 97) / 97.0L);
  }
  return static_cast<double>(total / static_cast<long double>(tokens.size()));
}

class ShiftedScorer final : public scoring::Scorer {
 public:
  explicit ShiftedScorer(double shift) : shift_(shift) {}
  std::vector<double> score_tokens(const Tokens& tokens, scoring::Aggregation mode) const override {
    auto s = scoring::MockScorer{}.score_tokens(tokens, mode);
    for (auto& v : s) v += shift_;
    return s;
  }

 private:
  double shift_;
};

class TableScorer final : public scoring::Scorer {
 public:
  explicit TableScorer(std::map<std::string, double> table) : table_(std::move(table)) {}
  std::vector<double> score_tokens(const Tokens& tokens, scoring::Aggregation) const override {
    std::vector<double> out;
    for (const auto& t : tokens) out.push_back(table_.at(t));
    return out;
  }

 private:
  std::map<std::string, double> table_;
};

scoring::Prediction random_prediction(std::mt19937_64& rng, const std::string& id, Eigen::Index k) {
  std::uniform_real_distribution<double> u(-5.0, 0.0);
  scoring::Prediction p;
  p.id = id;
  p.scores = Eigen::VectorXd::NullaryExpr(k, [&] { return u(rng); });
  p.probs = scoring::softmax(p.scores);
  p.argmax = scoring::argmax(p.probs);
  return p;
}

std::vector<QAInstance> synthetic_instances(const std::string& prefix, std::size_t n) {
  std::vector<QAInstance> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = prefix + std::to_string(i);
    out[i].question = "What is " + std::to_string(i) + "?";
    out[i].candidates = {"a", "b", "c", "d", "e"};
    out[i].gold = i % 5;
  }
  return out;
}

Outcome treebank_round_trip() {
  Outcome o;
  std::mt19937_64 rng(1000);
  const auto start = Clock::now();
  int equal = 0;
  for (int n = 0; n < 1000; ++n) {
    const treebank::Tree tree{testing::random_node(rng, 6)};
    if (treebank::parse_ptb(treebank::serialize(tree.root)) == tree) ++equal;
  }
  const double s = seconds_since(start);
  o.require(equal == 1000, std::to_string(equal) + "/1000 trees equal after round trip");
  o.require(s < kTreebankSeconds, "took " + std::to_string(s) + " s");
  if (o.pass) o.detail = "1000/1000 trees, " + std::to_string(s) + " s";
  return o;
}

Outcome wh_table() {
  Outcome o;
  const auto table = rewrite::WhTable::defaults();
  const std::map<std::string, Tokens> expected{{"what", {kMaskToken}},        {"who", {kMaskToken}},
                                               {"which", {kMaskToken}},       {"why", {"because", kMaskToken}},
                                               {"how", {"by", kMaskToken}},   {"where", {"at", kMaskToken}},
                                               {"when", {"when", kMaskToken}}};
  for (const auto& [word, replacement] : expected) {
    const auto it = table.entries().find(word);
    o.require(it != table.entries().end() && it->second == replacement, "entry '" + word + "'");
    const auto m = table.match({capitalize(word)}, 0);
    o.require(m && m->replacement == replacement, "capitalised '" + word + "'");
  }
  if (o.pass) o.detail = "7/7 entries";
  return o;
}

Outcome rewriter_fixtures() {
  Outcome o;
  const auto table = rewrite::WhTable::defaults();
  const auto start = Clock::now();
  std::size_t exact = 0;
  bool fire = false;
  for (const auto& f : testing::rewrite_fixtures()) {
    const auto got = rewrite::transform(treebank::parse_ptb(f.ptb), table, {f.drop_aux}).text();
    o.require(got == f.cloze, std::string(f.name) + ": got '" + got + "'");
    if (got == f.cloze) ++exact;
    if (got == "But is a good idea not required to have a fire extinguisher at [MASK].") fire = true;
  }
  o.require(exact >= 5, "fewer than 5 exact fixtures");
  o.require(fire, "fire-extinguisher fixture missing");

  std::ifstream in(std::string(CLOZE_TEST_DATA) + "/parses_100.tsv");
  std::string line;
  std::size_t total = 0, ok = 0;
  while (std::getline(in, line)) {
    ++total;
    try {
      const auto c = rewrite::transform(treebank::parse_ptb(line.substr(line.find('\t') + 1)), table);
      o.require(count_masks(c.tokens()) == 1 && c.tokens().back() == ".", "corpus output '" + c.text() + "'");
      ++ok;
    } catch (const UntranslatableError&) {
    }
  }
  const double s = seconds_since(start);
  o.require(total == 100, "corpus has " + std::to_string(total) + " lines");
  o.require(s < kRewriteSeconds, "took " + std::to_string(s) + " s");
  if (o.pass)
    o.detail = std::to_string(exact) + " fixtures exact, " + std::to_string(ok) +
               "/100 corpus outputs well-formed (rest untranslatable), " + std::to_string(s) + " s";
  return o;
}

Outcome edit_tagger() {
  Outcome o;
  const Tokens source = tokenize("A ten years old boy go school");
  const Tokens target = tokenize("A ten-year-old boy goes to school.");
  const auto first = tagging::encode_tags(tagging::align(source, target)).to_string();
  o.require(first == "KEEP;KEEP;MERGE_HYPHEN;NOUN_NUMBER_SINGULAR;KEEP;KEEP;VERB_FORM_VB_VBZ;APPEND_.",
            "encode gave " + first);
  const auto passes = tagging::encode_iterative(source, target);
  const auto applied = detokenize(tagging::apply_passes(source, passes));
  o.require(applied == "A ten-year-old boy goes to school.", "apply gave '" + applied + "'");

  std::mt19937_64 rng(4242);
  const auto start = Clock::now();
  int reconstructed = 0, changed = 0;
  std::size_t most_passes = 0;
  for (int n = 0; n < 1000; ++n) {
    const Tokens s = testing::random_sentence(rng, 1, 12);
    const Tokens t = testing::perturb(s, rng, std::uniform_int_distribution<int>(1, 3)(rng));
    if (s != t) ++changed;
    try {
      const auto p = tagging::encode_iterative(s, t);
      most_passes = std::max(most_passes, p.size());
      if (tagging::apply_passes(s, p) == t) ++reconstructed;
    } catch (const ConvergenceError&) {
    }
  }
  const double secs = seconds_since(start);
  o.require(reconstructed == 1000, std::to_string(reconstructed) + "/1000 pairs reconstructed");
  o.require(secs < kTaggerSeconds, "took " + std::to_string(secs) + " s");
  if (o.pass)
    o.detail = "worked example exact in " + std::to_string(passes.size()) + " passes, 1000/1000 pairs (" +
               std::to_string(changed) + " non-identity, at most " + std::to_string(most_passes) + " passes), " +
               std::to_string(secs) + " s";
  return o;
}

Outcome sentence_scoring() {
  Outcome o;
  std::mt19937_64 rng(200);
  const scoring::MockScorer mock;
  double worst = 0;
  for (int n = 0; n < 200; ++n) {
    const Tokens s = testing::random_sentence(rng, 1, 30);
    const double got = scoring::score_sentence(s, mock, {});
    worst = std::max(worst, std::abs(got - oracle_sentence(s)));
  }
  o.require(worst <= kScoreTolerance, "max deviation " + std::to_string(worst));

  const TableScorer table({{"short", -2.0}, {"long", -1.5}, {"one", -1.5}, {".", -1.5}});
  const double short_mean = scoring::score_sentence({"short", "."}, table, {});
  const double long_mean = scoring::score_sentence({"long", "one", "."}, table, {});
  o.require(short_mean < long_mean, "mean should prefer the longer sentence");
  const double short_sum = -2.0 - 1.5, long_sum = -1.5 * 3;
  o.require(short_sum > long_sum, "counterexample no longer separates mean from sum");
  if (o.pass) {
    std::ostringstream d;
    d << "200 sentences, max |diff| " << worst << ", mean-vs-sum case holds";
    o.detail = d.str();
  }
  return o;
}

Outcome softmax_properties() {
  Outcome o;
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int n = 0; n < 500; ++n) {
    const Eigen::Index k = std::uniform_int_distribution<Eigen::Index>(2, 8)(rng);
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(k, [&] { return u(rng); });
    const double c = u(rng) * 10;
    const Eigen::VectorXd p = scoring::softmax(x);
    o.require(std::abs(p.sum() - 1.0) <= kSumTolerance, "sum deviates");
    const Eigen::VectorXd q = scoring::softmax((x.array() + c).matrix());
    o.require((p - q).cwiseAbs().maxCoeff() <= kShiftTolerance, "shift changes probabilities");
    o.require(scoring::argmax(p) == scoring::argmax(x), "softmax changes argmax");
  }

  const QAInstance inst{"q", "", std::nullopt, {}, std::nullopt};
  for (int n = 0; n < 500; ++n) {
    QAInstance q = inst;
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    for (std::size_t i = 0; i < k; ++i) q.candidates.push_back(join(testing::random_sentence(rng, 1, 3)));
    Tokens ct = testing::random_sentence(rng, 1, 8);
    ct.insert(ct.begin() + static_cast<std::ptrdiff_t>(rng() % (ct.size() + 1)), kMaskToken);
    ct.push_back(".");
    const ClozeQuestion cloze(ct, "q", Translator::syntactic);
    const auto base = scoring::score_candidates(q, cloze, scoring::MockScorer{}, {});
    const auto shifted = scoring::score_candidates(q, cloze, ShiftedScorer(u(rng)), {});
    o.require(base.argmax == shifted.argmax, "per-token shift changes argmax");
    o.require((base.probs - shifted.probs).cwiseAbs().maxCoeff() <= 1e-9, "per-token shift changes probabilities");
  }
  if (o.pass) o.detail = "500 vectors + 500 scored questions";
  return o;
}

Outcome ensemble_properties() {
  Outcome o;
  std::mt19937_64 rng(700);
  for (int n = 0; n < 500; ++n) {
    const Eigen::Index k = std::uniform_int_distribution<Eigen::Index>(2, 6)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<scoring::Prediction> members;
    for (std::size_t m = 0; m < j; ++m) members.push_back(random_prediction(rng, "q", k));
    const auto base = consistency::ensemble(members);

    auto shuffled = members;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = consistency::ensemble(shuffled);
    o.require(perm.pseudo_label == base.pseudo_label && (perm.summed - base.summed).cwiseAbs().maxCoeff() < 1e-12,
              "permutation changes the ensemble");

    const double scale = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    auto scaled = members;
    for (auto& p : scaled) p.probs *= scale;
    o.require(consistency::ensemble(scaled).pseudo_label == base.pseudo_label, "scaling changes the argmax");

    const auto single = consistency::ensemble(std::span(members).first(1));
    o.require(single.pseudo_label == members[0].argmax && single.summed == members[0].probs, "J=1 is not identity");
  }
  scoring::Prediction tie;
  tie.id = "t";
  tie.probs = Eigen::Vector3d(0.25, 0.5, 0.25);
  scoring::Prediction tie2 = tie;
  tie2.probs = Eigen::Vector3d(0.5, 0.25, 0.25);
  const std::vector<scoring::Prediction> tied{tie, tie2};
  o.require(consistency::ensemble(tied).pseudo_label == 0, "tie does not resolve to lowest index");

  const QAInstance inst{"e1", "Q?", std::nullopt, {"a", "b", "c"}, 2};
  const std::vector<ClozeQuestion> clozes{ClozeQuestion::from_text("It is [MASK].", "e1", Translator::syntactic),
                                          ClozeQuestion::from_text("[MASK] it is.", "e1", Translator::tagger)};
  auto p1 = random_prediction(rng, "e1", 3), p2 = random_prediction(rng, "e1", 3);
  const std::vector<scoring::Prediction> preds{p1, p2};
  const auto result = consistency::ensemble(preds);
  const std::set<std::string> schema{"id", "cloze_tokens", "mask_index", "candidates", "pseudo_label", "translator"};
  for (const auto& rec : consistency::make_pseudo_records(inst, clozes, result)) {
    const auto line = consistency::to_jsonl(rec);
    o.require(consistency::parse_record(line) == rec, "record does not validate");
    const auto parsed = nlohmann::json::parse(line);
    std::set<std::string> keys;
    for (const auto& [k, v] : parsed.items()) keys.insert(k);
    o.require(keys == schema, "export has keys outside the schema");
  }
  if (o.pass) o.detail = "500 cases; exports validate, no gold field";
  return o;
}

Outcome dataset_harness() {
  Outcome o;
  const auto train = synthetic_instances("tr", datasets::kCsqaPublishedTrain);
  const auto dev = synthetic_instances("dv", datasets::kCsqaDev);
  const auto split = datasets::split_csqa(train, dev);
  o.require(split.train.size() == 8500 && split.dev.size() == 1221 && split.test.size() == 1241, "split sizes");
  std::set<std::string> train_ids, test_ids;
  for (const auto& q : split.train) train_ids.insert(q.id);
  for (const auto& q : split.test) test_ids.insert(q.id);
  o.require(train_ids.size() == 8500 && test_ids.size() == 1241, "duplicate ids in split");
  for (const auto& id : test_ids) o.require(!train_ids.count(id), "train/test overlap");
  o.require(datasets::manifest_of(datasets::split_csqa(train, dev)) == datasets::manifest_of(split),
            "split not deterministic");

  for (const std::size_t k : {16, 32, 64, 128}) {
    const auto a = datasets::sample_fewshot(split.train, k, datasets::kDefaultSeed);
    const auto b = datasets::sample_fewshot(split.train, k, datasets::kDefaultSeed);
    o.require(a.size() == k, "few-shot size " + std::to_string(k));
    bool same = true;
    for (std::size_t i = 0; i < k; ++i) same = same && a[i].id == b[i].id;
    o.require(same, "few-shot " + std::to_string(k) + " not deterministic");
  }

  std::vector<datasets::Choice> self;
  for (const auto& q : split.dev) self.push_back({q.id, *q.gold});
  o.require(datasets::accuracy(self, split.dev) == 1.0, "self accuracy is not 1.0");
  if (o.pass) o.detail = "8500/1221/1241, few-shot 16/32/64/128 deterministic, self accuracy 1.0";
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  report("treebank round-trip", treebank_round_trip);
  report("wh-replacement table", wh_table);
  report("tree-to-cloze fixtures and corpus", rewriter_fixtures);
  report("edit tagger worked example and random round-trips", edit_tagger);
  report("mean-of-token-scores against oracle", sentence_scoring);
  report("softmax and argmax invariances", softmax_properties);
  report("ensemble properties and export schema", ensemble_properties);
  report("dataset split, few-shot sampling, accuracy", dataset_harness);
  const double total = seconds_since(start);
  report("whole run on the mock backend", [&] {
    Outcome o;
    o.require(total < kSuiteSeconds, "took " + std::to_string(total) + " s");
    o.detail = std::to_string(total) + " s";
    return o;
  });
  return failures;
}
