#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "cloze/cloze_question.hpp"
#include "cloze/treebank.hpp"

/// Rule-based natural-question to cloze rewriting over constituency parses.
namespace cloze::rewrite {

/// Wh-word replacement rules. Keys are lower-case.
///
/// Single-word entries are the seven classic rules; two-word entries
/// ("how much", "how many") take precedence over "how" and map to a bare mask.
class WhTable {
 public:
  struct Match {
    std::size_t length;  // source tokens consumed
    Tokens replacement;
  };

  static WhTable defaults();

  WhTable() = default;
  void add(std::string word, Tokens replacement);
  void add_phrase(std::string first, std::string second, Tokens replacement);

  /// Wh match starting at `tokens[pos]`, if any (case-insensitive).
  std::optional<Match> match(const Tokens& tokens, std::size_t pos) const;

  const std::map<std::string, Tokens>& entries() const { return words_; }
  const std::map<std::pair<std::string, std::string>, Tokens>& phrase_entries() const { return phrases_; }

 private:
  std::map<std::string, Tokens> words_;
  std::map<std::pair<std::string, std::string>, Tokens> phrases_;
};

struct Options {
  /// Delete a do/does/did left directly before the verb phrase after swapping.
  bool drop_aux = false;
};

/// Rewrite a parsed question into a cloze.
///
/// Walks the tree: a child whose right sibling is SQ is a wh-phrase; it is
/// removed, its wh-word rewritten through the table, and the phrase placed
/// at the end of the SQ's yield (before trailing punctuation). An SQ child
/// otherwise gets its first two children swapped; anything else is
/// recursed into. Only the first wh-phrase yields a [MASK]. When the tree
/// has no SQ, or the walk produced no mask, the first wh-word in the
/// resulting sentence is replaced instead.
///
/// Throws UntranslatableError when no wh-word can be found.
ClozeQuestion transform(const treebank::Tree& tree, const WhTable& table, const Options& options = {},
                        std::string source_id = {});

/// Replace the first wh-word in `phrase`, keeping every other token.
Tokens replace_wh(const Tokens& phrase, const WhTable& table);

/// Swap children 0 and 1; nodes with fewer than two children come back unchanged.
treebank::Node swap_first_two_children(treebank::Node node);

/// Replace the first wh-word with a bare [MASK] and end the sentence with ".".
ClozeQuestion fallback_replace(const Tokens& tokens, const WhTable& table, std::string source_id = {});

}  // namespace cloze::rewrite
