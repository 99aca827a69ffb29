#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/text.hpp"

/// Penn-Treebank bracketed constituency trees.
///
/// A leaf is a preterminal: it carries a POS label and exactly one token and
/// has no children. Internal nodes carry a label and at least one child.
/// Tokens are opaque byte strings; -LRB-/-RRB- are ordinary tokens.
namespace cloze::treebank {

/// Half-open interval of token positions.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct Node {
  std::string label;
  std::optional<std::string> token;
  std::vector<Node> children;
  Span span;

  bool is_leaf() const { return token.has_value(); }

  static Node leaf(std::string label, std::string token);
  static Node internal(std::string label, std::vector<Node> children);

  bool operator==(const Node&) const = default;
};

struct Tree {
  Node root;
  bool operator==(const Tree&) const = default;
};

/// Parse one bracketed tree. Throws ParseError carrying the byte offset.
Tree parse_ptb(std::string_view text);

std::string serialize(const Node& node);
inline std::string serialize(const Tree& tree) { return serialize(tree.root); }

Tokens yield_tokens(const Node& node);
inline Tokens yield_tokens(const Tree& tree) { return yield_tokens(tree.root); }

/// Pre-order first node whose label equals `label`, or nullptr.
const Node* find_first(const Node& node, std::string_view label);
inline const Node* find_first(const Tree& tree, std::string_view label) { return find_first(tree.root, label); }

/// Reassign spans left to right starting at `start`; returns the end position.
std::size_t assign_spans(Node& node, std::size_t start = 0);

/// Check all structural invariants (leaf/internal shape, contiguous spans).
bool is_valid(const Node& node);

/// Collapse whitespace runs to one space and drop spaces adjacent to brackets
/// on the inside, i.e. the canonical form produced by serialize.
std::string normalize_whitespace(std::string_view text);

/// Read a parse fixture stream: one tree per line, blank lines ignored.
std::vector<Tree> read_parses(std::istream& in);

}  // namespace cloze::treebank
