#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cloze {

/// One multiple-choice question.
struct QAInstance {
  std::string id;
  std::string question;
  std::optional<std::string> context;  // prepended at scoring time (SocialIQA)
  std::vector<std::string> candidates;
  std::optional<std::size_t> gold;

  /// Throws DataError: needs >= 2 non-empty candidates and an in-range gold.
  void validate() const;
};

}  // namespace cloze
