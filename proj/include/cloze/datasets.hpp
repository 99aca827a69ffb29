#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cloze/qa_instance.hpp"
#include "cloze/scoring.hpp"

namespace cloze::datasets {

/// CommonsenseQA / OpenbookQA JSONL: question.stem, question.choices[{label,text}],
/// optional answerKey. Candidates are ordered by label. OpenbookQA fact fields are ignored.
std::vector<QAInstance> read_multiple_choice_jsonl(std::istream& in);
std::vector<QAInstance> load_commonsenseqa(const std::filesystem::path& path);
std::vector<QAInstance> load_openbookqa(const std::filesystem::path& path);

/// SocialIQA JSONL (context, question, answerA..C) with an optional label
/// stream holding one 1-based answer per line. Ids are "<prefix>-<line>".
std::vector<QAInstance> read_socialiqa(std::istream& in, std::istream* labels, const std::string& id_prefix = "siqa");
std::vector<QAInstance> load_socialiqa(const std::filesystem::path& path, const std::filesystem::path& labels = {});

inline constexpr std::size_t kCsqaPublishedTrain = 9741;
inline constexpr std::size_t kCsqaTrain = 8500;
inline constexpr std::size_t kCsqaDev = 1221;
inline constexpr std::size_t kCsqaTest = 1241;
inline constexpr std::uint64_t kDefaultSeed = 13;

struct Split {
  std::vector<QAInstance> train;
  std::vector<QAInstance> dev;
  std::vector<QAInstance> test;
  std::uint64_t seed = kDefaultSeed;
};

/// Seeded shuffle of the published train set into 8,500 train / 1,241 test;
/// the published dev set is kept verbatim. Throws DataError on other sizes.
Split split_csqa(std::span<const QAInstance> published_train, std::span<const QAInstance> published_dev,
                 std::uint64_t seed = kDefaultSeed);

/// Fisher-Yates permutation of 0..n-1 from a seeded mt19937_64; identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Uniform sample of k instances without replacement. Throws DataError if k > |train|.
std::vector<QAInstance> sample_fewshot(std::span<const QAInstance> train, std::size_t k, std::uint64_t seed);

/// "split.manifest": [train] / [dev] / [test] sections, one id per line.
struct Manifest {
  std::vector<std::string> train, dev, test;
  bool operator==(const Manifest&) const = default;
};
Manifest manifest_of(const Split& split);
void write_manifest(std::ostream& out, const Manifest& manifest);
Manifest read_manifest(std::istream& in);

struct Choice {
  std::string id;
  std::size_t index = 0;
};

/// Fraction of choices matching gold. Throws DataError when a choice id is
/// unknown or its instance has no gold label.
double accuracy(std::span<const Choice> choices, std::span<const QAInstance> gold);
double accuracy(std::span<const scoring::Prediction> predictions, std::span<const QAInstance> gold);

struct ClozePair {
  std::string natural;
  std::string cloze;
};

/// TSV "natural TAB cloze"; each cloze must hold exactly one [MASK].
std::vector<ClozePair> read_cloze_pairs(std::istream& in);
std::vector<ClozePair> load_cloze_pairs(const std::filesystem::path& path);

}  // namespace cloze::datasets
