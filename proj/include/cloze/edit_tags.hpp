#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cloze/text.hpp"

/// Token-level edit-tag transduction: per-token KEEP/DELETE/APPEND/REPLACE and grammar transforms, applied in passes.
///
/// A pass assigns one tag to every source position plus a leading sentinel
/// (which may only KEEP or APPEND). Edits that need more than one tag on the
/// same token are left for the next pass.
namespace cloze::tagging {

enum class TagKind { keep, remove, append, replace, merge_hyphen, noun_number_singular, verb_form_vb_vbz };

struct EditTag {
  TagKind kind = TagKind::keep;
  std::string payload;  // only for append / replace

  static EditTag keep() { return {TagKind::keep, {}}; }
  static EditTag remove() { return {TagKind::remove, {}}; }
  static EditTag append(std::string tok) { return {TagKind::append, std::move(tok)}; }
  static EditTag replace(std::string tok) { return {TagKind::replace, std::move(tok)}; }
  static EditTag merge_hyphen() { return {TagKind::merge_hyphen, {}}; }
  static EditTag noun_number_singular() { return {TagKind::noun_number_singular, {}}; }
  static EditTag verb_form_vb_vbz() { return {TagKind::verb_form_vb_vbz, {}}; }

  bool has_payload() const { return kind == TagKind::append || kind == TagKind::replace; }

  /// KEEP, DELETE, APPEND_tok, REPLACE_tok, MERGE_HYPHEN, ...; payload bytes
  /// ';', '\\' and TAB are backslash-escaped.
  std::string to_string() const;
  static EditTag parse(std::string_view text);

  bool operator==(const EditTag&) const = default;
};

/// Position 0 is the sentinel; position i+1 tags source token i.
struct EditTagSequence {
  std::vector<EditTag> tags;

  static EditTagSequence all_keep(std::size_t source_size);

  /// Throws ApplyError if the sequence cannot tag a source of this size.
  void validate(std::size_t source_size) const;

  std::string to_string() const;  // tags joined by ';'
  static EditTagSequence parse(std::string_view line);

  bool operator==(const EditTagSequence&) const = default;
};

/// Target-side unit. Hyphenated target tokens are split into word pieces
/// separated by glue pieces ("-") that share a compound index.
struct Piece {
  std::string text;
  bool glue = false;
  std::size_t compound = 0;
  bool operator==(const Piece&) const = default;
};

std::vector<Piece> expand_target(const Tokens& target);

/// Rejoin pieces into tokens (inverse of expand_target).
Tokens join_pieces(const std::vector<Piece>& pieces);

enum class AlignOp { match, case_match, replace, remove };

/// Pieces owned by one source token: [begin, head_end) is what the token
/// itself became, [head_end, end) was inserted after it.
struct Block {
  AlignOp op = AlignOp::match;
  std::size_t begin = 0;
  std::size_t head_end = 0;
  std::size_t end = 0;
  bool operator==(const Block&) const = default;
};

struct Alignment {
  Tokens source;
  std::vector<Piece> target;
  std::size_t sentinel_end = 0;  // pieces [0, sentinel_end) precede every source token
  std::vector<Block> blocks;     // one per source token

  /// Edit cost in quarter units (match 0, case-only 1, replace/delete/insert 4).
  int cost = 0;

  std::vector<Piece> owned(std::size_t i) const;
  std::vector<Piece> sentinel_owned() const;
};

inline constexpr int kCaseCost = 1;
inline constexpr int kEditCost = 4;

/// Minimum-cost monotone alignment. Ties prefer an exact match, then a
/// case-only match, replace, delete, insert, scanning left to right.
Alignment align(const Tokens& source, const Tokens& target);

EditTagSequence encode_tags(const Alignment& alignment);

Tokens apply_tags(const Tokens& source, const EditTagSequence& tags);

inline constexpr std::size_t kDefaultMaxPasses = 5;

/// Tag passes whose sequential application turns `source` into `target`.
/// Throws ConvergenceError with the residual difference when the pass
/// budget runs out.
std::vector<EditTagSequence> encode_iterative(const Tokens& source, const Tokens& target,
                                              std::size_t max_passes = kDefaultMaxPasses);

/// Apply passes in order.
Tokens apply_passes(Tokens source, const std::vector<EditTagSequence>& passes);

std::optional<std::string> singularize(std::string_view noun);
std::string third_person_singular(std::string_view verb);

/// Tag file: "id TAB tag;tag;..." per line; repeated ids are successive passes.
std::vector<std::pair<std::string, EditTagSequence>> read_tag_file(std::istream& in);
void write_tag_line(std::ostream& out, std::string_view id, const EditTagSequence& tags);

}  // namespace cloze::tagging
