#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/cloze_question.hpp"
#include "cloze/qa_instance.hpp"
#include "cloze/text.hpp"

/// Candidate answer scoring: fill the cloze mask with each candidate, score
/// the sentence as the mean of per-token LM scores, softmax over candidates.
namespace cloze::scoring {

enum class Aggregation { mean_log_prob, mean_logit };

std::string_view to_string(Aggregation a);
std::optional<Aggregation> parse_aggregation(std::string_view name);

struct ScoreConfig {
  Aggregation aggregation = Aggregation::mean_log_prob;
};

/// Per-token scoring backend. Implementations must be deterministic and
/// return exactly one score per input token.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score_tokens(const Tokens& tokens, Aggregation mode) const = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// -(0.5 + (FNV-1a64(token) mod 97) / 97)
double mock_token_score(std::string_view token);

/// Stateless hash scorer used for tests and offline runs. Ignores the mode.
class MockScorer final : public Scorer {
 public:
  std::vector<double> score_tokens(const Tokens& tokens, Aggregation mode) const override;
};

struct Prediction {
  std::string id;
  Translator translator = Translator::syntactic;
  Eigen::VectorXd scores;
  Eigen::VectorXd probs;
  Eigen::Index argmax = 0;
};

/// Numerically stable softmax over a vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar top = x.maxCoeff();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = (x.array() - top).exp().matrix();
  return e / e.sum();
}

/// Index of the largest coefficient; ties go to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& x) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (x(i) > x(best)) best = i;
  return best;
}

/// Replace [MASK] with the whitespace-split answer; context tokens, if any, go first.
Tokens substitute(const ClozeQuestion& cloze, std::string_view answer,
                  const std::optional<std::string>& context = std::nullopt);

/// Arithmetic mean of the scorer's per-token scores.
double score_sentence(const Tokens& tokens, const Scorer& scorer, const ScoreConfig& config);

Prediction score_candidates(const QAInstance& instance, const ClozeQuestion& cloze, const Scorer& scorer,
                            const ScoreConfig& config);

/// {"id","translator","scores","probs","argmax"} on one line.
std::string to_jsonl(const Prediction& p);
Prediction parse_prediction(std::string_view line);

}  // namespace cloze::scoring
