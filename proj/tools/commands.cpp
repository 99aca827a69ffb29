#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "cloze/cloze_question.hpp"
#include "cloze/consistency.hpp"
#include "cloze/datasets.hpp"
#include "cloze/edit_tags.hpp"
#include "cloze/rewriter.hpp"
#include "cloze/scoring.hpp"
#include "cloze/service_client.hpp"
#include "cloze/treebank.hpp"

namespace clozeqa {

using namespace cloze;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<Translator> parse_translator_list(const std::string& list) {
  std::vector<Translator> out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty()) continue;
    const auto t = parse_translator(name);
    if (!t) throw UsageError("unknown translator '" + name + "'");
    if (std::find(out.begin(), out.end(), *t) == out.end()) out.push_back(*t);
  }
  if (out.empty()) throw UsageError("no translators selected");
  return out;
}

scoring::Aggregation aggregation_of(const RunOptions& opt) {
  const auto a = scoring::parse_aggregation(opt.aggregation);
  if (!a) throw UsageError("unknown aggregation '" + opt.aggregation + "'");
  return *a;
}

std::shared_ptr<const ServiceClient> connect(const std::string& url) {
  try {
    return std::make_shared<const ServiceClient>(Endpoint::parse(url));
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

std::shared_ptr<const ServiceClient> service_of(const RunOptions& opt) {
  if (!opt.service.empty()) return connect(opt.service);
  if (opt.backend != "mock") return connect(opt.backend);
  return nullptr;
}

std::unique_ptr<scoring::Scorer> scorer_of(const RunOptions& opt) {
  if (opt.backend == "mock") return std::make_unique<scoring::MockScorer>();
  return std::make_unique<RemoteScorer>(connect(opt.backend), static_cast<std::ptrdiff_t>(opt.max_in_flight));
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

std::vector<QAInstance> load_questions(const RunOptions& opt, const fs::path& path) {
  if (path.empty()) throw UsageError("--questions is required");
  if (!fs::exists(path)) throw DataError("cannot open " + path.string());
  if (opt.format == "siqa") return datasets::load_socialiqa(path, opt.labels);
  if (opt.format == "obqa") return datasets::load_openbookqa(path);
  return datasets::load_commonsenseqa(path);
}

std::vector<QAInstance> load_questions(const RunOptions& opt) { return load_questions(opt, opt.questions); }

/// "id TAB text" lines, in file order.
std::vector<std::pair<std::string, std::string>> read_id_tsv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw DataError(path.string() + ": expected id TAB text", n);
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

fs::path clozes_path(const RunOptions& opt, Translator t) {
  return opt.out / ("clozes." + std::string(to_string(t)) + ".tsv");
}
fs::path predictions_path(const RunOptions& opt, Translator t) {
  return opt.out / ("predictions." + std::string(to_string(t)) + ".jsonl");
}

std::map<std::string, ClozeQuestion> read_clozes(const RunOptions& opt, Translator t) {
  std::map<std::string, ClozeQuestion> clozes;
  std::size_t n = 0;
  for (auto& [id, text] : read_id_tsv(clozes_path(opt, t))) {
    ++n;
    try {
      clozes.emplace(id, ClozeQuestion::from_text(text, id, t));
    } catch (const DataError& e) {
      throw DataError(clozes_path(opt, t).string() + ": " + e.what(), n);
    }
  }
  return clozes;
}

std::optional<std::map<std::string, scoring::Prediction>> read_predictions(const RunOptions& opt, Translator t) {
  const auto path = predictions_path(opt, t);
  if (!fs::exists(path)) return std::nullopt;
  auto in = open_in(path);
  std::map<std::string, scoring::Prediction> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      auto p = scoring::parse_prediction(line);
      out.emplace(p.id, std::move(p));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what(), n);
    }
  }
  return out;
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next++;
          if (i >= n) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

struct Outcome {
  std::string id;
  std::optional<ClozeQuestion> cloze;
  std::string reason;
};

class TranslateRun {
 public:
  explicit TranslateRun(const RunOptions& opt) : opt_(opt), service_(service_of(opt)) {
    if (!opt.questions.empty()) {
      for (auto& q : load_questions(opt)) items_.emplace_back(q.id, q.question);
    }
    if (!opt.parses.empty())
      for (auto& [id, ptb] : read_id_tsv(opt.parses)) parses_.emplace(id, ptb);
    if (!opt.pairs.empty())
      for (auto& p : datasets::load_cloze_pairs(opt.pairs)) pairs_.emplace(p.natural, p.cloze);
    if (!opt.tags.empty()) {
      auto in = open_in(opt.tags);
      for (auto& [id, seq] : tagging::read_tag_file(in)) tags_[id].push_back(std::move(seq));
    }
  }

  std::vector<Outcome> run(Translator t) {
    std::vector<std::pair<std::string, std::string>> items = items_;
    if (items.empty()) {
      if (t != Translator::syntactic || opt_.parses.empty())
        throw UsageError("--questions is required for the " + std::string(to_string(t)) + " translator");
      for (auto& [id, ptb] : read_id_tsv(opt_.parses)) items.emplace_back(id, std::string());
    }
    std::vector<Outcome> out;
    for (const auto& [id, text] : items) {
      Outcome o{id, std::nullopt, {}};
      try {
        o.cloze = translate(t, id, text);
      } catch (const UntranslatableError& e) {
        o.reason = e.what();
      } catch (const ParseError& e) {
        o.reason = std::string("parse: ") + e.what();
      } catch (const ApplyError& e) {
        o.reason = std::string("tags: ") + e.what();
      } catch (const ConvergenceError& e) {
        o.reason = std::string("tags: ") + e.what();
      } catch (const DataError& e) {
        o.reason = std::string("invalid cloze: ") + e.what();
      }
      out.push_back(std::move(o));
    }
    return out;
  }

  const std::string& generated_tags() const { return tag_log_; }

 private:
  ClozeQuestion translate(Translator t, const std::string& id, const std::string& text) {
    switch (t) {
      case Translator::syntactic:
        return syntactic(id, text);
      case Translator::tagger:
        return tagger(id, text);
      case Translator::manual: {
        const auto it = pairs_.find(text);
        if (opt_.pairs.empty()) throw UsageError("the manual translator needs --pairs");
        if (it == pairs_.end()) throw UntranslatableError("no reference cloze");
        return ClozeQuestion::from_text(it->second, id, t);
      }
      case Translator::seq2seq_remote:
      case Translator::unsup_remote: {
        if (!service_) throw UsageError(std::string(to_string(t)) + " needs --service or a URL --backend");
        const auto reply = service_->translate(text, t == Translator::seq2seq_remote ? "sup_seq2seq" : "unsup_seq2seq");
        return ClozeQuestion::from_text(reply.cloze, id, t);
      }
    }
    throw UsageError("unsupported translator");
  }

  ClozeQuestion syntactic(const std::string& id, const std::string& text) {
    std::string ptb;
    if (!opt_.parses.empty()) {
      const auto it = parses_.find(id);
      if (it == parses_.end()) throw UntranslatableError("no parse");
      ptb = it->second;
    } else if (service_) {
      ptb = service_->parse(text);
    } else {
      throw UsageError("the syntactic translator needs --parses or a service");
    }
    static const auto table = rewrite::WhTable::defaults();
    return rewrite::transform(treebank::parse_ptb(ptb), table, {opt_.drop_aux}, id);
  }

  ClozeQuestion tagger(const std::string& id, const std::string& text) {
    const Tokens source = tokenize(text);
    if (!opt_.tags.empty()) {
      const auto it = tags_.find(id);
      if (it == tags_.end()) throw UntranslatableError("no tags");
      return ClozeQuestion(tagging::apply_passes(source, it->second), id, Translator::tagger);
    }
    if (opt_.pairs.empty()) throw UsageError("the tagger translator needs --tags or --pairs");
    const auto it = pairs_.find(text);
    if (it == pairs_.end()) throw UntranslatableError("no reference cloze");
    const auto passes = tagging::encode_iterative(source, tokenize(it->second), opt_.max_passes);
    std::ostringstream log;
    for (const auto& p : passes) tagging::write_tag_line(log, id, p);
    tag_log_ += log.str();
    return ClozeQuestion(tagging::apply_passes(source, passes), id, Translator::tagger);
  }

  const RunOptions& opt_;
  std::shared_ptr<const ServiceClient> service_;
  std::vector<std::pair<std::string, std::string>> items_;
  std::map<std::string, std::string> parses_, pairs_;
  std::map<std::string, std::vector<tagging::EditTagSequence>> tags_;
  std::string tag_log_;
};

}  // namespace

int cmd_translate(const RunOptions& opt) {
  const auto translators = parse_translator_list(opt.translators);
  TranslateRun run(opt);
  for (const Translator t : translators) {
    std::string clozes, skipped;
    std::size_t ok = 0, bad = 0;
    for (const auto& o : run.run(t)) {
      if (o.cloze) {
        clozes += o.id + '\t' + o.cloze->text() + '\n';
        ++ok;
      } else {
        skipped += o.id + '\t' + o.reason + '\n';
        ++bad;
      }
    }
    const auto path = clozes_path(opt, t);
    write_file(path, clozes);
    auto skipped_path = path;
    skipped_path.replace_extension(".skipped");
    if (bad)
      write_file(skipped_path, skipped);
    else
      fs::remove(skipped_path);
    std::cerr << to_string(t) << ": " << ok << " translated, " << bad << " skipped\n";
  }
  if (!run.generated_tags().empty()) write_file(opt.out / "edit_tags.tsv", run.generated_tags());
  return 0;
}

int cmd_score(const RunOptions& opt) {
  const auto translators = parse_translator_list(opt.translators);
  const auto questions = load_questions(opt);
  const auto scorer = scorer_of(opt);
  const scoring::ScoreConfig config{aggregation_of(opt)};
  for (const Translator t : translators) {
    const auto clozes = read_clozes(opt, t);
    std::vector<std::pair<const QAInstance*, const ClozeQuestion*>> jobs;
    for (const auto& q : questions)
      if (const auto it = clozes.find(q.id); it != clozes.end()) jobs.emplace_back(&q, &it->second);

    std::vector<std::string> lines(jobs.size());
    parallel_for(jobs.size(), opt.max_in_flight, [&](std::size_t i) {
      lines[i] = scoring::to_jsonl(scoring::score_candidates(*jobs[i].first, *jobs[i].second, *scorer, config));
    });
    std::string body;
    for (const auto& l : lines) body += l + '\n';
    write_file(predictions_path(opt, t), body);
    std::cerr << to_string(t) << ": scored " << jobs.size() << " of " << questions.size() << '\n';
  }
  return 0;
}

int cmd_pseudolabel(const RunOptions& opt) {
  const auto translators = parse_translator_list(opt.translators);
  const auto questions = load_questions(opt);

  std::vector<std::pair<std::map<std::string, scoring::Prediction>, std::map<std::string, ClozeQuestion>>> runs;
  for (const Translator t : translators) {
    auto preds = read_predictions(opt, t);
    if (!preds) continue;
    runs.emplace_back(std::move(*preds), read_clozes(opt, t));
  }
  if (runs.empty()) throw DataError("no predictions found in " + opt.out.string() + "; run score first");

  std::vector<consistency::PseudoLabelRecord> records;
  for (const auto& q : questions) {
    std::vector<scoring::Prediction> members;
    std::vector<ClozeQuestion> clozes;
    for (const auto& [preds, cl] : runs) {
      const auto p = preds.find(q.id);
      const auto c = cl.find(q.id);
      if (p == preds.end() || c == cl.end()) continue;
      members.push_back(p->second);
      clozes.push_back(c->second);
    }
    if (members.empty()) continue;
    const auto result = consistency::ensemble(members);
    for (auto& r : consistency::make_pseudo_records(q, clozes, result)) records.push_back(std::move(r));
  }

  std::string body;
  for (const auto& r : records) body += consistency::to_jsonl(r) + '\n';
  write_file(opt.out / "pseudo_labels.jsonl", body);
  std::cerr << "pseudo-labelled " << records.size() << " clozes\n";

  if (opt.submit) {
    const auto client = service_of(opt);
    if (!client) throw UsageError("--submit needs --service or a URL --backend");
    const auto ack =
        consistency::submit_training(records, *client, {opt.learning_rate, opt.steps}, opt.batch_size, opt.run_id);
    std::cerr << "submitted " << ack.accepted << " records in " << ack.batches << " batches, step " << ack.step << '\n';
  }
  return 0;
}

int cmd_evaluate(const RunOptions& opt) {
  const auto translators = parse_translator_list(opt.translators);
  const auto questions = load_questions(opt);

  json report{{"instances", questions.size()}, {"translators", json::object()}};
  std::map<std::string, std::vector<scoring::Prediction>> by_id;
  for (const Translator t : translators) {
    const auto preds = read_predictions(opt, t);
    if (!preds) continue;
    std::vector<scoring::Prediction> list;
    for (const auto& q : questions)
      if (const auto it = preds->find(q.id); it != preds->end()) {
        list.push_back(it->second);
        by_id[q.id].push_back(it->second);
      }
    if (list.empty()) continue;
    const double acc = datasets::accuracy(list, questions);
    report["translators"][std::string(to_string(t))] = {{"accuracy", acc}, {"predicted", list.size()}};
    std::cout << to_string(t) << '\t' << acc << '\t' << list.size() << '\n';
  }
  if (by_id.empty()) throw DataError("no predictions found in " + opt.out.string() + "; run score first");

  std::vector<datasets::Choice> choices;
  for (const auto& q : questions)
    if (const auto it = by_id.find(q.id); it != by_id.end())
      choices.push_back({q.id, static_cast<std::size_t>(consistency::ensemble(it->second).pseudo_label)});
  const double acc = datasets::accuracy(choices, questions);
  report["ensemble"] = {{"accuracy", acc}, {"predicted", choices.size()}};
  std::cout << "ensemble\t" << acc << '\t' << choices.size() << '\n';
  write_file(opt.out / "accuracy.json", report.dump(2) + '\n');
  return 0;
}

int cmd_sample_fewshot(const RunOptions& opt) {
  const auto questions = load_questions(opt);
  for (const std::size_t k : opt.shots) {
    std::string body;
    for (const auto& q : datasets::sample_fewshot(questions, k, opt.seed)) body += q.id + '\n';
    write_file(opt.out / ("fewshot_" + std::to_string(k) + ".ids"), body);
  }
  return 0;
}

int cmd_split(const RunOptions& opt) {
  if (opt.dev.empty()) throw UsageError("--dev is required");
  const auto train = load_questions(opt);
  const auto dev = load_questions(opt, opt.dev);
  const auto split = datasets::split_csqa(train, dev, opt.seed);
  std::ostringstream out;
  datasets::write_manifest(out, datasets::manifest_of(split));
  write_file(opt.out / "split.manifest", out.str());
  std::cerr << "train " << split.train.size() << ", dev " << split.dev.size() << ", test " << split.test.size() << '\n';
  return 0;
}

}  // namespace clozeqa
