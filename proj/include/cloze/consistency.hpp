#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/cloze_question.hpp"
#include "cloze/qa_instance.hpp"
#include "cloze/scoring.hpp"

namespace cloze {
class ServiceClient;
}

/// Combining predictions from several cloze translations (or several
/// models) by summing softmax probabilities, and turning the winner into
/// pseudo-labelled training records.
namespace cloze::consistency {

struct EnsembleResult {
  std::string id;
  Eigen::VectorXd summed;  // sums to the number of members
  Eigen::Index pseudo_label = 0;
  std::size_t members = 0;
};

/// Elementwise probability sum; ties resolve to the lowest index.
/// Throws StructuralError on an empty list or mismatched ids / candidate counts.
EnsembleResult ensemble(std::span<const scoring::Prediction> predictions);

/// Same arithmetic over the model axis.
inline EnsembleResult ensemble_models(std::span<const scoring::Prediction> predictions) {
  return ensemble(predictions);
}

/// Translators combined when none are configured.
std::vector<Translator> default_translation_set();

/// One cross-entropy training example: the cloze with its candidate set,
/// the pseudo-label as positive and every other candidate as negative.
struct PseudoLabelRecord {
  std::string id;
  Tokens cloze_tokens;
  std::size_t mask_index = 0;
  std::vector<std::string> candidates;
  std::size_t pseudo_label = 0;
  Translator translator = Translator::syntactic;

  std::vector<std::size_t> negatives() const;
  bool operator==(const PseudoLabelRecord&) const = default;
};

std::vector<PseudoLabelRecord> make_pseudo_records(const QAInstance& instance, std::span<const ClozeQuestion> clozes,
                                                   const EnsembleResult& result);

/// {"id","cloze_tokens","mask_index","candidates","pseudo_label","translator"}
std::string to_jsonl(const PseudoLabelRecord& record);

/// Parses and validates against the export schema: exactly the six keys,
/// correct types, mask_index pointing at [MASK], pseudo_label in range.
/// Throws DataError otherwise (including any gold/label field).
PseudoLabelRecord parse_record(std::string_view line);

struct TrainHyperparameters {
  double learning_rate = 1e-5;
  std::size_t steps = 2000;
};

struct TrainAck {
  std::size_t accepted = 0;
  std::size_t step = 0;
  std::size_t batches = 0;
};

/// POST records to /v1/train in batches of `batch_size`; batch ids are
/// "<run_id>-<index>" so a resubmitted batch is recognised by the service.
/// Throws RetriableError naming the failing batch.
TrainAck submit_training(std::span<const PseudoLabelRecord> records, const ServiceClient& client,
                         const TrainHyperparameters& hyper, std::size_t batch_size, std::string_view run_id);

}  // namespace cloze::consistency
