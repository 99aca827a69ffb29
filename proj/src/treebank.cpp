#include "cloze/treebank.hpp"

#include <istream>

#include "cloze/error.hpp"

namespace cloze::treebank {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Tree read_tree() {
    skip_space();
    Tree tree{read_node()};
    skip_space();
    if (pos_ != text_.size()) throw ParseError("trailing input after tree", pos_);
    assign_spans(tree.root);
    return tree;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect_more() const {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
  }

  Node read_node() {
    expect_more();
    if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
    const std::size_t open = pos_++;
    skip_space();
    expect_more();
    if (text_[pos_] == ')') throw ParseError("empty node", open);
    if (text_[pos_] == '(') throw ParseError("internal node without label", open);
    std::string label(read_atom());

    skip_space();
    expect_more();
    if (text_[pos_] == ')') throw ParseError("node '" + label + "' has neither token nor children", open);

    Node node;
    node.label = std::move(label);
    if (text_[pos_] != '(') {
      node.token = std::string(read_atom());
      skip_space();
      expect_more();
      if (text_[pos_] != ')') throw ParseError("expected ')' after token", pos_);
      ++pos_;
      return node;
    }
    while (true) {
      skip_space();
      expect_more();
      if (text_[pos_] == ')') break;
      if (text_[pos_] != '(') throw ParseError("bare token among child nodes", pos_);
      node.children.push_back(read_node());
    }
    ++pos_;
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void serialize_into(const Node& node, std::string& out) {
  out += '(';
  out += node.label;
  if (node.is_leaf()) {
    out += ' ';
    out += *node.token;
  } else {
    for (const auto& child : node.children) {
      out += ' ';
      serialize_into(child, out);
    }
  }
  out += ')';
}

void yield_into(const Node& node, Tokens& out) {
  if (node.is_leaf()) {
    out.push_back(*node.token);
    return;
  }
  for (const auto& child : node.children) yield_into(child, out);
}

}  // namespace

Node Node::leaf(std::string label, std::string token) {
  Node n;
  n.label = std::move(label);
  n.token = std::move(token);
  n.span = {0, 1};
  return n;
}

Node Node::internal(std::string label, std::vector<Node> children) {
  Node n;
  n.label = std::move(label);
  n.children = std::move(children);
  assign_spans(n);
  return n;
}

Tree parse_ptb(std::string_view text) { return Reader(text).read_tree(); }

std::string serialize(const Node& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

Tokens yield_tokens(const Node& node) {
  Tokens out;
  yield_into(node, out);
  return out;
}

const Node* find_first(const Node& node, std::string_view label) {
  if (node.label == label) return &node;
  for (const auto& child : node.children)
    if (const Node* hit = find_first(child, label)) return hit;
  return nullptr;
}

std::size_t assign_spans(Node& node, std::size_t start) {
  std::size_t end = start;
  if (node.is_leaf()) {
    end = start + 1;
  } else {
    for (auto& child : node.children) end = assign_spans(child, end);
  }
  node.span = {start, end};
  return end;
}

bool is_valid(const Node& node) {
  if (node.label.empty()) return false;
  if (node.is_leaf()) return !node.token->empty() && node.children.empty() && node.span.size() == 1;
  if (node.children.empty()) return false;
  std::size_t cursor = node.span.begin;
  for (const auto& child : node.children) {
    if (child.span.begin != cursor || !is_valid(child)) return false;
    cursor = child.span.end;
  }
  return cursor == node.span.end;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty() && out.back() != '(' && c != ')') out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::vector<Tree> read_parses(std::istream& in) {
  std::vector<Tree> trees;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    trees.push_back(parse_ptb(line));
  }
  return trees;
}

}  // namespace cloze::treebank
