#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <memory>

#include "cloze/error.hpp"
#include "commands.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kBackend = 3, kData = 4 };

// key=value file where [section] headers only group keys: every key is a long option name.
class SectionedConfig : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> flat;
    for (auto& item : CLI::ConfigINI::from_config(input)) {
      if (item.name == "++" || item.name == "--") continue;
      item.parents.clear();
      flat.push_back(std::move(item));
    }
    return flat;
  }
};

}  // namespace

int main(int argc, char** argv) {
  clozeqa::RunOptions opt;
  CLI::App app{"Translate multiple-choice questions into cloze form and score them with a masked language model"};
  app.config_formatter(std::make_shared<SectionedConfig>());
  app.set_config("--config", "", "key=value file, optionally grouped in [sections]; keys are long option names");
  app.allow_config_extras(false);
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--backend", opt.backend, "mock, or http://host:port of the scoring service")->capture_default_str();
  app.add_option("--service", opt.service, "http://host:port for parse/translate/train (default: the backend URL)");
  app.add_option("--translators", opt.translators, "comma-separated translator names")->capture_default_str();
  app.add_option("--aggregation", opt.aggregation, "mean_log_prob or mean_logit")->capture_default_str();
  app.add_option("--seed", opt.seed)->capture_default_str();
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_flag("--drop-aux", opt.drop_aux, "delete the do-support auxiliary after the swap");
  app.add_option("--questions", opt.questions, "questions JSONL");
  app.add_option("--format", opt.format, "questions format")
      ->check(CLI::IsMember({"csqa", "obqa", "siqa"}))
      ->capture_default_str();
  app.add_option("--labels", opt.labels, "SocialIQA label file");
  app.add_option("--dev", opt.dev, "published dev JSONL (split)");
  app.add_option("--parses", opt.parses, "id TAB bracketed parse");
  app.add_option("--tags", opt.tags, "id TAB edit tags, one line per pass");
  app.add_option("--pairs", opt.pairs, "natural TAB cloze pairs");
  app.add_option("--shots", opt.shots, "few-shot sizes")->delimiter(',')->capture_default_str();
  app.add_option("--max-in-flight", opt.max_in_flight)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--max-passes", opt.max_passes)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--submit", opt.submit, "send pseudo-labels to the service's /v1/train");
  app.add_option("--batch-size", opt.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--lr", opt.learning_rate)->capture_default_str();
  app.add_option("--steps", opt.steps)->capture_default_str();
  app.add_option("--run-id", opt.run_id)->capture_default_str();

  std::function<int(const clozeqa::RunOptions&)> command;
  auto sub = [&](const char* name, const char* help, int (*fn)(const clozeqa::RunOptions&)) {
    app.add_subcommand(name, help)->callback([&command, fn] { command = fn; });
  };
  sub("translate", "write clozes.<translator>.tsv", clozeqa::cmd_translate);
  sub("score", "write predictions.<translator>.jsonl", clozeqa::cmd_score);
  sub("pseudolabel", "ensemble translations into pseudo_labels.jsonl", clozeqa::cmd_pseudolabel);
  sub("evaluate", "write accuracy.json", clozeqa::cmd_evaluate);
  sub("sample-fewshot", "write fewshot_<k>.ids", clozeqa::cmd_sample_fewshot);
  sub("split", "write split.manifest", clozeqa::cmd_split);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return command(opt);
  } catch (const clozeqa::UsageError& e) {
    std::cerr << "clozeqa: " << e.what() << '\n';
    return kUsage;
  } catch (const cloze::TransportError& e) {
    std::cerr << "clozeqa: backend: " << e.what() << '\n';
    return kBackend;
  } catch (const cloze::RetriableError& e) {
    std::cerr << "clozeqa: backend: " << e.what() << '\n';
    return kBackend;
  } catch (const cloze::Error& e) {
    std::cerr << "clozeqa: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "clozeqa: " << e.what() << '\n';
    return kFailure;
  }
}
