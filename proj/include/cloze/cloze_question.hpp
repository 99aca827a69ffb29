#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cloze/text.hpp"

namespace cloze {

enum class Translator { syntactic, tagger, seq2seq_remote, unsup_remote, manual };

std::string_view to_string(Translator t);
std::optional<Translator> parse_translator(std::string_view name);

/// A sentence with exactly one [MASK] token, ending in ".".
class ClozeQuestion {
 public:
  /// Throws DataError unless the tokens satisfy the invariants.
  ClozeQuestion(Tokens tokens, std::string source_id, Translator translator);

  /// Tokenizes `text`, normalizing terminal "?"/"!" (or a missing terminal)
  /// to "."; throws DataError unless exactly one [MASK] is present.
  static ClozeQuestion from_text(std::string_view text, std::string source_id, Translator translator);

  const Tokens& tokens() const { return tokens_; }
  std::size_t mask_index() const { return mask_index_; }
  const std::string& source_id() const { return source_id_; }
  Translator translator() const { return translator_; }
  std::string text() const { return detokenize(tokens_); }

  bool operator==(const ClozeQuestion&) const = default;

 private:
  Tokens tokens_;
  std::size_t mask_index_ = 0;
  std::string source_id_;
  Translator translator_;
};

/// Make the sequence end in exactly one ".": a trailing "?" or "!" is
/// replaced, anything else gets "." appended.
void normalize_terminal(Tokens& tokens);

}  // namespace cloze
