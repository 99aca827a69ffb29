#include "cloze/rewriter.hpp"

#include <algorithm>

#include "cloze/error.hpp"

namespace cloze::rewrite {

namespace {

struct Leaf {
  std::string token;
  std::string pos;
  bool sentence_initial = false;
};

// Mutable copy of the parse that tracks removed subtrees and phrases moved
// to the end of an SQ.
struct WorkNode {
  std::string label;
  std::optional<Leaf> leaf;
  std::vector<WorkNode> children;
  std::vector<Leaf> tail;
  bool removed = false;
};

WorkNode make_work(const treebank::Node& node, bool& first_leaf) {
  WorkNode w;
  w.label = node.label;
  if (node.is_leaf()) {
    w.leaf = Leaf{*node.token, node.label, first_leaf};
    first_leaf = false;
    return w;
  }
  w.children.reserve(node.children.size());
  for (const auto& child : node.children) w.children.push_back(make_work(child, first_leaf));
  return w;
}

bool is_punct_leaf(const Leaf& leaf) { return is_punctuation_token(leaf.token) || leaf.pos == "."; }

void collect(const WorkNode& node, std::vector<Leaf>& out) {
  if (node.removed) return;
  if (node.leaf) {
    out.push_back(*node.leaf);
    return;
  }
  const std::size_t start = out.size();
  for (const auto& child : node.children) collect(child, out);
  if (!node.tail.empty()) {
    std::size_t at = out.size();
    while (at > start && is_punct_leaf(out[at - 1])) --at;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), node.tail.begin(), node.tail.end());
  }
}

bool is_do_aux(const WorkNode& node) {
  if (!node.leaf || node.removed) return false;
  const std::string tok = to_lower(node.leaf->token);
  return (tok == "do" || tok == "does" || tok == "did") && node.label.starts_with("VB");
}

bool is_verbal(const WorkNode& node) { return node.label.starts_with("VP") || node.label.starts_with("VB"); }

// Replace the first wh-word in `leaves`; returns false when there is none.
bool replace_first_wh(std::vector<Leaf>& leaves, const WhTable& table) {
  Tokens tokens;
  tokens.reserve(leaves.size());
  for (const auto& l : leaves) tokens.push_back(l.token);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto match = table.match(tokens, i);
    if (!match) continue;
    std::vector<Leaf> replacement;
    for (auto& tok : match->replacement) replacement.push_back(Leaf{tok, tok == kMask ? "MASK" : "IN", false});
    auto first = leaves.begin() + static_cast<std::ptrdiff_t>(i);
    leaves.erase(first, first + static_cast<std::ptrdiff_t>(match->length));
    leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(i), replacement.begin(), replacement.end());
    return true;
  }
  return false;
}

class Walker {
 public:
  Walker(const WhTable& table, const Options& options) : table_(table), options_(options) {}

  void run(WorkNode& node) {
    if (node.leaf) return;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      WorkNode& child = node.children[i];
      WorkNode* next = i + 1 < node.children.size() ? &node.children[i + 1] : nullptr;
      if (next && next->label == "SQ" && move_wh(child, *next)) continue;
      if (child.label == "SQ") {
        swap_children(child);
      } else {
        run(child);
      }
    }
  }

  bool masked() const { return masked_; }

 private:
  bool move_wh(WorkNode& phrase, WorkNode& sq) {
    if (masked_) return false;
    std::vector<Leaf> leaves;
    collect(phrase, leaves);
    if (!replace_first_wh(leaves, table_)) return false;
    phrase.removed = true;
    sq.tail.insert(sq.tail.end(), leaves.begin(), leaves.end());
    masked_ = true;
    return true;
  }

  void swap_children(WorkNode& sq) {
    if (sq.children.size() < 2) return;
    std::swap(sq.children[0], sq.children[1]);
    if (options_.drop_aux && !dropped_aux_ && sq.children.size() >= 3 && is_do_aux(sq.children[1]) &&
        is_verbal(sq.children[2])) {
      sq.children[1].removed = true;
      dropped_aux_ = true;
    }
  }

  const WhTable& table_;
  const Options& options_;
  bool masked_ = false;
  bool dropped_aux_ = false;
};

void fix_case(std::vector<Leaf>& leaves) {
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    Leaf& l = leaves[i];
    if (l.sentence_initial && l.pos != "NNP" && l.pos != "NNPS" && !l.token.empty() && l.token[0] >= 'A' &&
        l.token[0] <= 'Z')
      l.token[0] = static_cast<char>(l.token[0] - 'A' + 'a');
  }
  if (!leaves.empty()) leaves[0].token = capitalize(leaves[0].token);
}

Tokens tokens_of(const std::vector<Leaf>& leaves) {
  Tokens out;
  out.reserve(leaves.size());
  for (const auto& l : leaves) out.push_back(l.token);
  return out;
}

}  // namespace

WhTable WhTable::defaults() {
  const std::string mask(kMask);
  WhTable t;
  t.add("what", {mask});
  t.add("who", {mask});
  t.add("which", {mask});
  t.add("why", {"because", mask});
  t.add("how", {"by", mask});
  t.add("where", {"at", mask});
  t.add("when", {"when", mask});
  t.add_phrase("how", "much", {mask});
  t.add_phrase("how", "many", {mask});
  return t;
}

void WhTable::add(std::string word, Tokens replacement) { words_[to_lower(word)] = std::move(replacement); }

void WhTable::add_phrase(std::string first, std::string second, Tokens replacement) {
  phrases_[{to_lower(first), to_lower(second)}] = std::move(replacement);
}

std::optional<WhTable::Match> WhTable::match(const Tokens& tokens, std::size_t pos) const {
  if (pos >= tokens.size()) return std::nullopt;
  const std::string word = to_lower(tokens[pos]);
  if (pos + 1 < tokens.size()) {
    auto it = phrases_.find({word, to_lower(tokens[pos + 1])});
    if (it != phrases_.end()) return Match{2, it->second};
  }
  auto it = words_.find(word);
  if (it != words_.end()) return Match{1, it->second};
  return std::nullopt;
}

Tokens replace_wh(const Tokens& phrase, const WhTable& table) {
  for (std::size_t i = 0; i < phrase.size(); ++i) {
    auto match = table.match(phrase, i);
    if (!match) continue;
    Tokens out(phrase.begin(), phrase.begin() + static_cast<std::ptrdiff_t>(i));
    out.insert(out.end(), match->replacement.begin(), match->replacement.end());
    out.insert(out.end(), phrase.begin() + static_cast<std::ptrdiff_t>(i + match->length), phrase.end());
    return out;
  }
  throw UntranslatableError("no wh-word in phrase: " + join(phrase));
}

treebank::Node swap_first_two_children(treebank::Node node) {
  if (node.children.size() < 2) return node;
  std::swap(node.children[0], node.children[1]);
  treebank::assign_spans(node, node.span.begin);
  return node;
}

ClozeQuestion fallback_replace(const Tokens& tokens, const WhTable& table, std::string source_id) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto match = table.match(tokens, i);
    if (!match) continue;
    Tokens out(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
    out.emplace_back(kMask);
    out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i + match->length), tokens.end());
    normalize_terminal(out);
    return ClozeQuestion(std::move(out), std::move(source_id), Translator::syntactic);
  }
  throw UntranslatableError("no wh-word in sentence: " + join(tokens));
}

ClozeQuestion transform(const treebank::Tree& tree, const WhTable& table, const Options& options,
                        std::string source_id) {
  bool first_leaf = true;
  WorkNode root = make_work(tree.root, first_leaf);

  bool masked = false;
  if (treebank::find_first(tree, "SQ")) {
    Walker walker(table, options);
    walker.run(root);
    masked = walker.masked();
  }

  std::vector<Leaf> leaves;
  collect(root, leaves);
  fix_case(leaves);
  Tokens tokens = tokens_of(leaves);
  if (!masked) {
    ClozeQuestion fallback = fallback_replace(tokens, table, std::move(source_id));
    Tokens out = fallback.tokens();
    out[0] = capitalize(out[0]);
    return ClozeQuestion(std::move(out), fallback.source_id(), Translator::syntactic);
  }
  normalize_terminal(tokens);
  if (count_masks(tokens) != 1) throw UntranslatableError("rewrite did not yield exactly one [MASK]");
  return ClozeQuestion(std::move(tokens), std::move(source_id), Translator::syntactic);
}

}  // namespace cloze::rewrite
