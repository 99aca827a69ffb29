#include "cloze/edit_tags.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "cloze/error.hpp"

namespace cloze::tagging {

namespace {

constexpr std::string_view kAppendPrefix = "APPEND_";
constexpr std::string_view kReplacePrefix = "REPLACE_";

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ';' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      out += s[i] == 't' ? '\t' : s[i];
    } else {
      out += s[i];
    }
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) { return s.ends_with(suffix); }

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string join_range(const std::vector<Piece>& pieces, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t k = begin; k < end; ++k) out += pieces[k].text;
  return out;
}

// Suffix-cost table for aligning source[i:] with pieces[j:].
class CostTable {
 public:
  CostTable(const Tokens& source, const std::vector<Piece>& pieces)
      : source_(source), pieces_(pieces), cols_(pieces.size() + 1), cost_((source.size() + 1) * cols_) {
    const std::size_t n = source.size(), m = pieces.size();
    for (std::size_t i = n + 1; i-- > 0;) {
      for (std::size_t j = m + 1; j-- > 0;) {
        if (i == n) {
          at(i, j) = kEditCost * static_cast<int>(m - j);
          continue;
        }
        if (j == m) {
          at(i, j) = kEditCost * static_cast<int>(n - i);
          continue;
        }
        int best = kEditCost + at(i + 1, j);
        best = std::min(best, kEditCost + at(i, j + 1));
        if (!pieces[j].glue) best = std::min(best, kEditCost + at(i + 1, j + 1));
        for_each_run(i, j, [&](std::size_t end, int c) { best = std::min(best, c + at(i + 1, end)); });
        at(i, j) = best;
      }
    }
  }

  int operator()(std::size_t i, std::size_t j) const { return cost_[i * cols_ + j]; }

  // Calls fn(end, cost) for each run of pieces [j, end) within one compound
  // that spells source[i] exactly (cost 0) or up to case (kCaseCost).
  template <typename Fn>
  void for_each_run(std::size_t i, std::size_t j, Fn&& fn) const {
    if (pieces_[j].glue) return;
    const std::string& word = source_[i];
    std::string joined = pieces_[j].text;
    std::size_t k = j;
    while (true) {
      if (joined == word) {
        fn(k + 1, 0);
      } else if (iequals(joined, word)) {
        fn(k + 1, kCaseCost);
      }
      if (joined.size() >= word.size()) break;
      if (k + 2 >= pieces_.size() || !pieces_[k + 1].glue || pieces_[k + 1].compound != pieces_[j].compound) break;
      joined += pieces_[k + 1].text;
      joined += pieces_[k + 2].text;
      k += 2;
    }
  }

 private:
  int& at(std::size_t i, std::size_t j) { return cost_[i * cols_ + j]; }

  const Tokens& source_;
  const std::vector<Piece>& pieces_;
  std::size_t cols_;
  std::vector<int> cost_;
};

}  // namespace

std::string EditTag::to_string() const {
  switch (kind) {
    case TagKind::keep:
      return "KEEP";
    case TagKind::remove:
      return "DELETE";
    case TagKind::append:
      return std::string(kAppendPrefix) + escape(payload);
    case TagKind::replace:
      return std::string(kReplacePrefix) + escape(payload);
    case TagKind::merge_hyphen:
      return "MERGE_HYPHEN";
    case TagKind::noun_number_singular:
      return "NOUN_NUMBER_SINGULAR";
    case TagKind::verb_form_vb_vbz:
      return "VERB_FORM_VB_VBZ";
  }
  return "KEEP";
}

EditTag EditTag::parse(std::string_view text) {
  if (text == "KEEP") return keep();
  if (text == "DELETE") return remove();
  if (text == "MERGE_HYPHEN") return merge_hyphen();
  if (text == "NOUN_NUMBER_SINGULAR") return noun_number_singular();
  if (text == "VERB_FORM_VB_VBZ") return verb_form_vb_vbz();
  if (text.starts_with(kAppendPrefix) && text.size() > kAppendPrefix.size())
    return append(unescape(text.substr(kAppendPrefix.size())));
  if (text.starts_with(kReplacePrefix) && text.size() > kReplacePrefix.size())
    return replace(unescape(text.substr(kReplacePrefix.size())));
  throw DataError("unknown edit tag '" + std::string(text) + "'");
}

EditTagSequence EditTagSequence::all_keep(std::size_t source_size) {
  return {std::vector<EditTag>(source_size + 1, EditTag::keep())};
}

void EditTagSequence::validate(std::size_t source_size) const {
  if (tags.size() != source_size + 1)
    throw ApplyError("tag sequence has " + std::to_string(tags.size()) + " tags for " + std::to_string(source_size) +
                     " tokens plus sentinel");
  if (tags[0].kind != TagKind::keep && tags[0].kind != TagKind::append)
    throw ApplyError("sentinel position admits only KEEP or APPEND");
  for (const auto& t : tags)
    if (t.has_payload() == t.payload.empty()) throw ApplyError("tag payload mismatch: " + t.to_string());
}

std::string EditTagSequence::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += ';';
    out += tags[i].to_string();
  }
  return out;
}

EditTagSequence EditTagSequence::parse(std::string_view line) {
  EditTagSequence seq;
  std::string current;
  bool escaped = false;
  for (char c : line) {
    if (escaped) {
      current += '\\';
      current += c;
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == ';') {
      seq.tags.push_back(EditTag::parse(current));
      current.clear();
    } else {
      current += c;
    }
  }
  while (!current.empty() && (current.back() == ' ' || current.back() == '\r')) current.pop_back();
  if (!current.empty()) seq.tags.push_back(EditTag::parse(current));
  return seq;
}

std::vector<Piece> expand_target(const Tokens& target) {
  std::vector<Piece> pieces;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const std::string& tok = target[t];
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t dash = tok.find('-', start);
      parts.push_back(tok.substr(start, dash == std::string::npos ? std::string::npos : dash - start));
      if (dash == std::string::npos) break;
      start = dash + 1;
    }
    const bool splittable =
        parts.size() > 1 && std::none_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); });
    if (!splittable) {
      pieces.push_back({tok, false, t});
      continue;
    }
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (p) pieces.push_back({"-", true, t});
      pieces.push_back({parts[p], false, t});
    }
  }
  return pieces;
}

Tokens join_pieces(const std::vector<Piece>& pieces) {
  Tokens out;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const bool continues =
        k > 0 && pieces[k - 1].compound == pieces[k].compound && (pieces[k].glue || pieces[k - 1].glue);
    if (continues) {
      out.back() += pieces[k].text;
    } else {
      out.push_back(pieces[k].text);
    }
  }
  return out;
}

std::vector<Piece> Alignment::owned(std::size_t i) const {
  const Block& b = blocks.at(i);
  return {target.begin() + static_cast<std::ptrdiff_t>(b.begin), target.begin() + static_cast<std::ptrdiff_t>(b.end)};
}

std::vector<Piece> Alignment::sentinel_owned() const {
  return {target.begin(), target.begin() + static_cast<std::ptrdiff_t>(sentinel_end)};
}

Alignment align(const Tokens& source, const Tokens& target) {
  if (source.empty() || target.empty()) throw StructuralError("align requires non-empty source and target");
  Alignment a;
  a.source = source;
  a.target = expand_target(target);
  a.blocks.resize(source.size());
  const CostTable cost(a.source, a.target);
  a.cost = cost(0, 0);

  const std::size_t n = source.size(), m = a.target.size();
  std::size_t i = 0, j = 0;
  // Piece insertions extend the block of the last consumed source token.
  auto extend_owner = [&](std::size_t new_end) {
    if (i == 0) {
      a.sentinel_end = new_end;
    } else {
      a.blocks[i - 1].end = new_end;
    }
  };
  while (i < n || j < m) {
    const int here = cost(i, j);
    if (i < n && j < m) {
      std::optional<std::pair<std::size_t, int>> run;
      cost.for_each_run(i, j, [&](std::size_t end, int c) {
        if (c + cost(i + 1, end) != here) return;
        if (!run || c < run->second) run = std::pair{end, c};
      });
      if (run) {
        a.blocks[i] = {run->second == 0 ? AlignOp::match : AlignOp::case_match, j, run->first, run->first};
        j = run->first;
        ++i;
        continue;
      }
      if (!a.target[j].glue && kEditCost + cost(i + 1, j + 1) == here) {
        a.blocks[i] = {AlignOp::replace, j, j + 1, j + 1};
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && kEditCost + cost(i + 1, j) == here) {
      a.blocks[i] = {AlignOp::remove, j, j, j};
      ++i;
      continue;
    }
    ++j;
    extend_owner(j);
  }
  return a;
}

EditTagSequence encode_tags(const Alignment& a) {
  EditTagSequence seq;
  seq.tags.reserve(a.source.size() + 1);
  seq.tags.push_back(a.sentinel_end > 0 ? EditTag::append(a.target[0].text) : EditTag::keep());

  for (std::size_t i = 0; i < a.source.size(); ++i) {
    const Block& b = a.blocks[i];
    const std::string& tok = a.source[i];
    const bool has_tail = b.end > b.head_end;
    const Piece* tail0 = has_tail ? &a.target[b.head_end] : nullptr;
    EditTag tag = EditTag::keep();
    switch (b.op) {
      case AlignOp::match:
        if (!tail0) break;
        if (!tail0->glue) {
          tag = EditTag::append(tail0->text);
        } else if (b.end - b.head_end > 1) {
          // glue followed by more inserted pieces: emit the next word now, glue it on a later pass
          tag = EditTag::append(a.target[b.head_end + 1].text);
        } else if (i + 1 < a.source.size() && a.blocks[i + 1].end > a.blocks[i + 1].begin) {
          tag = EditTag::merge_hyphen();
        }
        break;
      case AlignOp::case_match:
        tag = EditTag::replace(join_range(a.target, b.begin, b.head_end));
        break;
      case AlignOp::replace: {
        const std::string& want = a.target[b.begin].text;
        if (auto singular = singularize(tok); singular && *singular == want) {
          tag = EditTag::noun_number_singular();
        } else if (third_person_singular(tok) == want) {
          tag = EditTag::verb_form_vb_vbz();
        } else {
          tag = EditTag::replace(want);
        }
        break;
      }
      case AlignOp::remove:
        tag = tail0 && !tail0->glue ? EditTag::replace(tail0->text) : EditTag::remove();
        break;
    }
    seq.tags.push_back(std::move(tag));
  }
  return seq;
}

Tokens apply_tags(const Tokens& source, const EditTagSequence& seq) {
  seq.validate(source.size());
  Tokens out;
  bool glue_next = false;
  auto emit = [&](std::string tok) {
    if (glue_next) {
      out.back() += '-';
      out.back() += tok;
      glue_next = false;
    } else {
      out.push_back(std::move(tok));
    }
  };
  if (seq.tags[0].kind == TagKind::append) emit(seq.tags[0].payload);
  for (std::size_t i = 0; i < source.size(); ++i) {
    const EditTag& tag = seq.tags[i + 1];
    const std::string& tok = source[i];
    switch (tag.kind) {
      case TagKind::keep:
        emit(tok);
        break;
      case TagKind::remove:
        break;
      case TagKind::replace:
        emit(tag.payload);
        break;
      case TagKind::append:
        emit(tok);
        emit(tag.payload);
        break;
      case TagKind::merge_hyphen:
        if (i + 1 == source.size()) throw ApplyError("MERGE_HYPHEN on the last token '" + tok + "'");
        emit(tok);
        glue_next = true;
        break;
      case TagKind::noun_number_singular: {
        auto singular = singularize(tok);
        if (!singular) throw ApplyError("NOUN_NUMBER_SINGULAR does not apply to '" + tok + "'");
        emit(*singular);
        break;
      }
      case TagKind::verb_form_vb_vbz:
        emit(third_person_singular(tok));
        break;
    }
  }
  if (glue_next) throw ApplyError("MERGE_HYPHEN has no right neighbour to join");
  return out;
}

std::vector<EditTagSequence> encode_iterative(const Tokens& source, const Tokens& target, std::size_t max_passes) {
  if (max_passes == 0) throw StructuralError("max_passes must be at least 1");
  if (source == target) return {EditTagSequence::all_keep(source.size())};
  std::vector<EditTagSequence> passes;
  Tokens current = source;
  for (std::size_t p = 0; p < max_passes && current != target; ++p) {
    if (current.empty()) break;
    EditTagSequence tags = encode_tags(align(current, target));
    Tokens next = apply_tags(current, tags);
    passes.push_back(std::move(tags));
    if (next == current) break;
    current = std::move(next);
  }
  if (current != target)
    throw ConvergenceError("target not reached within " + std::to_string(max_passes) + " passes",
                           "have [" + join(current) + "] want [" + join(target) + "]");
  return passes;
}

Tokens apply_passes(Tokens source, const std::vector<EditTagSequence>& passes) {
  for (const auto& p : passes) source = apply_tags(source, p);
  return source;
}

std::optional<std::string> singularize(std::string_view w) {
  if (w.size() > 3 && ends_with(w, "ies")) return std::string(w.substr(0, w.size() - 3)) + "y";
  for (std::string_view suffix : {"ches", "shes", "ses", "xes", "zes"})
    if (w.size() > suffix.size() && ends_with(w, suffix)) return std::string(w.substr(0, w.size() - 2));
  if (w.size() > 1 && ends_with(w, "s") && !ends_with(w, "ss")) return std::string(w.substr(0, w.size() - 1));
  return std::nullopt;
}

std::string third_person_singular(std::string_view v) {
  if (v == "have") return "has";
  if (v == "be") return "is";
  for (std::string_view suffix : {"s", "x", "z", "ch", "sh", "o"})
    if (ends_with(v, suffix)) return std::string(v) + "es";
  if (v.size() > 1 && v.back() == 'y' && !is_vowel(v[v.size() - 2]))
    return std::string(v.substr(0, v.size() - 1)) + "ies";
  return std::string(v) + "s";
}

std::vector<std::pair<std::string, EditTagSequence>> read_tag_file(std::istream& in) {
  std::vector<std::pair<std::string, EditTagSequence>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("tag line lacks a TAB separator", lineno);
    try {
      out.emplace_back(line.substr(0, tab), EditTagSequence::parse(std::string_view(line).substr(tab + 1)));
    } catch (const DataError& e) {
      throw DataError(e.what(), lineno);
    }
  }
  return out;
}

void write_tag_line(std::ostream& out, std::string_view id, const EditTagSequence& tags) {
  out << id << '\t' << tags.to_string() << '\n';
}

}  // namespace cloze::tagging
