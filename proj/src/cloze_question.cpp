#include "cloze/cloze_question.hpp"

#include <algorithm>
#include <array>

#include "cloze/error.hpp"

namespace cloze {

namespace {

constexpr std::array<std::pair<Translator, std::string_view>, 5> kTranslatorNames{{
    {Translator::syntactic, "syntactic"},
    {Translator::tagger, "tagger"},
    {Translator::seq2seq_remote, "seq2seq_remote"},
    {Translator::unsup_remote, "unsup_remote"},
    {Translator::manual, "manual"},
}};

}  // namespace

std::string_view to_string(Translator t) {
  for (const auto& [value, name] : kTranslatorNames)
    if (value == t) return name;
  return "unknown";
}

std::optional<Translator> parse_translator(std::string_view name) {
  for (const auto& [value, n] : kTranslatorNames)
    if (n == name) return value;
  return std::nullopt;
}

ClozeQuestion::ClozeQuestion(Tokens tokens, std::string source_id, Translator translator)
    : tokens_(std::move(tokens)), source_id_(std::move(source_id)), translator_(translator) {
  if (tokens_.empty()) throw DataError("cloze question is empty");
  if (count_masks(tokens_) != 1) throw DataError("cloze question must contain exactly one [MASK]: " + join(tokens_));
  if (tokens_.back() != ".") throw DataError("cloze question must end with '.': " + join(tokens_));
  mask_index_ = static_cast<std::size_t>(std::find(tokens_.begin(), tokens_.end(), kMask) - tokens_.begin());
}

ClozeQuestion ClozeQuestion::from_text(std::string_view text, std::string source_id, Translator translator) {
  Tokens tokens = tokenize(text);
  normalize_terminal(tokens);
  return ClozeQuestion(std::move(tokens), std::move(source_id), translator);
}

void normalize_terminal(Tokens& tokens) {
  if (!tokens.empty() && (tokens.back() == "?" || tokens.back() == "!")) {
    tokens.back() = ".";
  } else if (tokens.empty() || tokens.back() != ".") {
    tokens.emplace_back(".");
  }
}

}  // namespace cloze
