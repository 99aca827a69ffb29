#include "cloze/text.hpp"

#include <algorithm>
#include <cctype>

namespace cloze {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_punct_char(char c) { return c == '.' || c == ',' || c == '?' || c == '!' || c == ';' || c == ':'; }

}  // namespace

Tokens split_whitespace(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  for (auto& word : split_whitespace(text)) {
    if (word == kMask) {
      out.push_back(word);
      continue;
    }
    std::size_t end = word.size();
    while (end > 0 && is_punct_char(word[end - 1])) --end;
    if (end == 0) {
      out.push_back(word);
      continue;
    }
    out.push_back(word.substr(0, end));
    for (std::size_t k = end; k < word.size(); ++k) out.emplace_back(1, word[k]);
  }
  return out;
}

bool is_punctuation_token(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), is_punct_char);
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !is_punctuation_token(t)) out += ' ';
    out += t;
  }
  return out;
}

std::string join(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::size_t count_masks(const Tokens& tokens) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), kMask));
}

std::size_t count_masks(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kMask); pos != std::string_view::npos; pos = text.find(kMask, pos + kMask.size())) ++n;
  return n;
}

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

}  // namespace cloze
