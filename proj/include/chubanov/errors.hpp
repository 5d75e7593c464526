#ifndef CHUBANOV_ERRORS_HPP
#define CHUBANOV_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chubanov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (different cone specs, wrong column count, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A function was called outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An eigensolver failed to converge on a block.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t block)
      : Error(what + " (block " + std::to_string(block) + ")"), block_(block) {}

  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

/// An element that must be invertible (or interior) is not.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::size_t block, double eigenvalue)
      : Error(what + " (block " + std::to_string(block) +
              ", eigenvalue " + std::to_string(eigenvalue) + ")"),
        block_(block),
        eigenvalue_(eigenvalue) {}

  std::size_t block() const noexcept { return block_; }
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::size_t block_;
  double eigenvalue_;
};

/// Malformed input file; `path` names the offending JSON field.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace chubanov

#endif  // CHUBANOV_ERRORS_HPP
