#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cloze {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed bracketed tree; `offset` is the byte position of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A translator could not produce a cloze for the question.
class UntranslatableError : public Error {
 public:
  using Error::Error;
};

/// An edit-tag sequence could not be applied to its source.
class ApplyError : public Error {
 public:
  using Error::Error;
};

/// Iterative tag encoding did not reach the target within the pass budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::string residual) : Error(what), residual_(std::move(residual)) {}
  const std::string& residual() const { return residual_; }

 private:
  std::string residual_;
};

/// Remote backend unreachable or returned an unusable response.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Inputs that disagree in shape (candidate counts, ids, empty lists).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Bad input data; `line` is 1-based, 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Training batch rejected or failed in transit; safe to resubmit.
class RetriableError : public Error {
 public:
  RetriableError(const std::string& what, std::size_t batch_index)
      : Error(what + " (batch " + std::to_string(batch_index) + ")"), batch_index_(batch_index) {}
  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

}  // namespace cloze
