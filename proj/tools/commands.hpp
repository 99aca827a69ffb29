#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cloze/error.hpp"

namespace clozeqa {

/// Bad flag combination or missing input discovered after argument parsing.
class UsageError : public cloze::Error {
 public:
  using cloze::Error::Error;
};

struct RunOptions {
  std::string backend = "mock";  // "mock" or http://host:port
  std::string service;           // sidecar for parse/translate/train; defaults to a URL backend
  std::string translators = "syntactic,seq2seq_remote,tagger";
  std::string aggregation = "mean_log_prob";
  std::uint64_t seed = 13;
  std::filesystem::path out = "out";
  bool drop_aux = false;

  std::filesystem::path questions;
  std::string format = "csqa";  // csqa | obqa | siqa
  std::filesystem::path labels;
  std::filesystem::path dev;
  std::filesystem::path parses;
  std::filesystem::path tags;
  std::filesystem::path pairs;

  std::vector<std::size_t> shots{16, 32, 64, 128};
  std::size_t max_in_flight = 8;
  std::size_t max_passes = 5;
  bool submit = false;
  std::size_t batch_size = 32;
  double learning_rate = 1e-5;
  std::size_t steps = 2000;
  std::string run_id = "run";
};

int cmd_translate(const RunOptions& opt);
int cmd_score(const RunOptions& opt);
int cmd_pseudolabel(const RunOptions& opt);
int cmd_evaluate(const RunOptions& opt);
int cmd_sample_fewshot(const RunOptions& opt);
int cmd_split(const RunOptions& opt);

}  // namespace clozeqa
