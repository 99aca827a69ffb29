#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cloze {

using Tokens = std::vector<std::string>;

inline constexpr std::string_view kMask = "[MASK]";

/// Split on ASCII whitespace only.
Tokens split_whitespace(std::string_view text);

/// Whitespace split, then detach trailing sentence punctuation (. , ? ! ; :)
/// into separate tokens. "[MASK]" and bare punctuation stay intact.
Tokens tokenize(std::string_view text);

/// Inverse of tokenize for ordinary sentences: tokens joined by a space,
/// punctuation tokens attached to their left neighbour.
std::string detokenize(const Tokens& tokens);

std::string join(const Tokens& tokens, std::string_view sep = " ");

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

bool is_punctuation_token(std::string_view tok);

/// Number of "[MASK]" tokens.
std::size_t count_masks(const Tokens& tokens);

/// Number of "[MASK]" substrings in raw text.
std::size_t count_masks(std::string_view text);

/// Upper-case the first byte if it is an ASCII lower-case letter.
std::string capitalize(std::string_view s);

}  // namespace cloze
