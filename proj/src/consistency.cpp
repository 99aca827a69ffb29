#include "cloze/consistency.hpp"

#include <json.hpp>

#include "cloze/error.hpp"
#include "cloze/service_client.hpp"

namespace cloze::consistency {

using nlohmann::json;

EnsembleResult ensemble(std::span<const scoring::Prediction> predictions) {
  if (predictions.empty()) throw StructuralError("ensemble needs at least one prediction");
  const auto& first = predictions.front();
  EnsembleResult r;
  r.id = first.id;
  r.summed = Eigen::VectorXd::Zero(first.probs.size());
  for (const auto& p : predictions) {
    if (p.id != r.id) throw StructuralError("ensemble mixes instances '" + r.id + "' and '" + p.id + "'");
    if (p.probs.size() != r.summed.size())
      throw StructuralError("ensemble for '" + r.id + "' mixes candidate counts " + std::to_string(r.summed.size()) +
                            " and " + std::to_string(p.probs.size()));
    r.summed += p.probs;
  }
  r.members = predictions.size();
  r.pseudo_label = scoring::argmax(r.summed);
  return r;
}

std::vector<Translator> default_translation_set() {
  return {Translator::syntactic, Translator::seq2seq_remote, Translator::tagger};
}

std::vector<std::size_t> PseudoLabelRecord::negatives() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (i != pseudo_label) out.push_back(i);
  return out;
}

std::vector<PseudoLabelRecord> make_pseudo_records(const QAInstance& instance, std::span<const ClozeQuestion> clozes,
                                                   const EnsembleResult& result) {
  if (result.id != instance.id) throw StructuralError("ensemble result does not belong to '" + instance.id + "'");
  if (static_cast<std::size_t>(result.summed.size()) != instance.candidates.size())
    throw StructuralError("ensemble candidate count differs from instance '" + instance.id + "'");
  std::vector<PseudoLabelRecord> out;
  out.reserve(clozes.size());
  for (const auto& c : clozes) {
    out.push_back({instance.id, c.tokens(), c.mask_index(), instance.candidates,
                   static_cast<std::size_t>(result.pseudo_label), c.translator()});
  }
  return out;
}

namespace {

json record_json(const PseudoLabelRecord& r) {
  return json{{"id", r.id},
              {"cloze_tokens", r.cloze_tokens},
              {"mask_index", r.mask_index},
              {"candidates", r.candidates},
              {"pseudo_label", r.pseudo_label},
              {"translator", std::string(to_string(r.translator))}};
}

}  // namespace

std::string to_jsonl(const PseudoLabelRecord& record) { return record_json(record).dump(); }

PseudoLabelRecord parse_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError(std::string("pseudo-label record is not JSON: ") + e.what());
  }
  static const std::vector<std::string> kKeys{"id",         "cloze_tokens", "mask_index",
                                              "candidates", "pseudo_label", "translator"};
  if (!j.is_object() || j.size() != kKeys.size()) throw DataError("pseudo-label record must have exactly six fields");
  for (const auto& k : kKeys)
    if (!j.contains(k)) throw DataError("pseudo-label record lacks '" + k + "'");
  if (!j["id"].is_string() || !j["cloze_tokens"].is_array() || !j["mask_index"].is_number_unsigned() ||
      !j["candidates"].is_array() || !j["pseudo_label"].is_number_unsigned() || !j["translator"].is_string())
    throw DataError("pseudo-label record has a field of the wrong type");

  PseudoLabelRecord r;
  try {
    r.id = j["id"].get<std::string>();
    r.cloze_tokens = j["cloze_tokens"].get<Tokens>();
    r.mask_index = j["mask_index"].get<std::size_t>();
    r.candidates = j["candidates"].get<std::vector<std::string>>();
    r.pseudo_label = j["pseudo_label"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("pseudo-label record has a malformed field: ") + e.what());
  }
  const auto translator = parse_translator(j["translator"].get<std::string>());
  if (!translator) throw DataError("pseudo-label record names an unknown translator");
  r.translator = *translator;
  if (r.mask_index >= r.cloze_tokens.size() || r.cloze_tokens[r.mask_index] != kMask ||
      count_masks(r.cloze_tokens) != 1)
    throw DataError("pseudo-label record '" + r.id + "' does not mark its single [MASK]");
  if (r.candidates.size() < 2 || r.pseudo_label >= r.candidates.size())
    throw DataError("pseudo-label record '" + r.id + "' has an out-of-range pseudo_label");
  return r;
}

TrainAck submit_training(std::span<const PseudoLabelRecord> records, const ServiceClient& client,
                         const TrainHyperparameters& hyper, std::size_t batch_size, std::string_view run_id) {
  if (batch_size == 0) throw StructuralError("batch_size must be positive");
  TrainAck ack;
  for (std::size_t start = 0, index = 0; start < records.size(); start += batch_size, ++index) {
    const std::size_t end = std::min(records.size(), start + batch_size);
    json batch = json::array();
    for (std::size_t k = start; k < end; ++k) batch.push_back(record_json(records[k]));
    const json request{{"batch_id", std::string(run_id) + "-" + std::to_string(index)},
                       {"records", std::move(batch)},
                       {"hyperparameters", {{"learning_rate", hyper.learning_rate}, {"steps", hyper.steps}}}};
    json reply;
    try {
      reply = json::parse(client.post("train", request.dump()));
    } catch (const TransportError& e) {
      throw RetriableError(e.what(), index);
    } catch (const json::exception& e) {
      throw RetriableError(std::string("malformed /train response: ") + e.what(), index);
    }
    const std::size_t accepted = reply.value("accepted", std::size_t{0});
    if (accepted != end - start)
      throw RetriableError(
          "/train accepted " + std::to_string(accepted) + " of " + std::to_string(end - start) + " records", index);
    ack.accepted += accepted;
    ack.step = reply.value("step", ack.step);
    ++ack.batches;
  }
  return ack;
}

}  // namespace cloze::consistency
