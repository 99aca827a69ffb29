#include "cloze/scoring.hpp"

#include <json.hpp>

#include "cloze/error.hpp"

namespace cloze {

void QAInstance::validate() const {
  if (candidates.size() < 2) throw DataError("instance '" + id + "' needs at least two candidates");
  for (const auto& c : candidates)
    if (c.find_first_not_of(" \t\r\n") == std::string::npos)
      throw DataError("instance '" + id + "' has an empty candidate");
  if (gold && *gold >= candidates.size()) throw DataError("instance '" + id + "' gold index out of range");
}

}  // namespace cloze

namespace cloze::scoring {

using nlohmann::json;

std::string_view to_string(Aggregation a) { return a == Aggregation::mean_logit ? "mean_logit" : "mean_log_prob"; }

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  if (name == "mean_log_prob") return Aggregation::mean_log_prob;
  if (name == "mean_logit") return Aggregation::mean_logit;
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double mock_token_score(std::string_view token) { return -(0.5 + static_cast<double>(fnv1a64(token) % 97) / 97.0); }

std::vector<double> MockScorer::score_tokens(const Tokens& tokens, Aggregation) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(mock_token_score(t));
  return out;
}

Tokens substitute(const ClozeQuestion& cloze, std::string_view answer, const std::optional<std::string>& context) {
  Tokens out;
  if (context) out = tokenize(*context);
  const Tokens answer_tokens = split_whitespace(answer);
  const Tokens& toks = cloze.tokens();
  out.insert(out.end(), toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(cloze.mask_index()));
  out.insert(out.end(), answer_tokens.begin(), answer_tokens.end());
  out.insert(out.end(), toks.begin() + static_cast<std::ptrdiff_t>(cloze.mask_index()) + 1, toks.end());
  return out;
}

double score_sentence(const Tokens& tokens, const Scorer& scorer, const ScoreConfig& config) {
  if (tokens.empty()) throw StructuralError("cannot score an empty sentence");
  const std::vector<double> per_token = scorer.score_tokens(tokens, config.aggregation);
  if (per_token.size() != tokens.size())
    throw TransportError("scorer returned " + std::to_string(per_token.size()) + " scores for " +
                         std::to_string(tokens.size()) + " tokens");
  return Eigen::Map<const Eigen::VectorXd>(per_token.data(), static_cast<Eigen::Index>(per_token.size())).mean();
}

Prediction score_candidates(const QAInstance& instance, const ClozeQuestion& cloze, const Scorer& scorer,
                            const ScoreConfig& config) {
  Prediction p;
  p.id = instance.id;
  p.translator = cloze.translator();
  p.scores.resize(static_cast<Eigen::Index>(instance.candidates.size()));
  try {
    for (std::size_t i = 0; i < instance.candidates.size(); ++i)
      p.scores(static_cast<Eigen::Index>(i)) =
          score_sentence(substitute(cloze, instance.candidates[i], instance.context), scorer, config);
  } catch (const TransportError& e) {
    throw TransportError("instance '" + instance.id + "': " + e.what());
  }
  p.probs = softmax(p.scores);
  p.argmax = argmax(p.probs);
  return p;
}

std::string to_jsonl(const Prediction& p) {
  json j;
  j["id"] = p.id;
  j["translator"] = std::string(to_string(p.translator));
  j["scores"] = std::vector<double>(p.scores.data(), p.scores.data() + p.scores.size());
  j["probs"] = std::vector<double>(p.probs.data(), p.probs.data() + p.probs.size());
  j["argmax"] = p.argmax;
  return j.dump();
}

Prediction parse_prediction(std::string_view line) {
  try {
    const json j = json::parse(line);
    Prediction p;
    p.id = j.at("id").get<std::string>();
    const auto translator = parse_translator(j.at("translator").get<std::string>());
    if (!translator) throw DataError("unknown translator in prediction '" + p.id + "'");
    p.translator = *translator;
    const auto scores = j.at("scores").get<std::vector<double>>();
    const auto probs = j.at("probs").get<std::vector<double>>();
    if (scores.size() != probs.size()) throw DataError("scores/probs length mismatch in '" + p.id + "'");
    p.scores = Eigen::Map<const Eigen::VectorXd>(scores.data(), static_cast<Eigen::Index>(scores.size()));
    p.probs = Eigen::Map<const Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
    p.argmax = j.at("argmax").get<Eigen::Index>();
    return p;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad prediction record: ") + e.what());
  }
}

}  // namespace cloze::scoring
