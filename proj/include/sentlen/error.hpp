#pragma once

#include <stdexcept>
#include <string>

namespace sentlen {

// Base for everything the library throws on bad input or I/O failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable file or malformed UTF-8 while loading a book.
class IngestError : public Error {
 public:
  IngestError(const std::string& path, const std::string& cause)
      : Error(path + ": " + cause), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Statistic undefined for this input, e.g. zero variance.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The fluctuation curve has too few positive points to fit a scale exponent.
class UndefinedExponent : public DegenerateInput {
 public:
  using DegenerateInput::DegenerateInput;
};

class OutputError : public Error {
 public:
  using Error::Error;
};

}  // namespace sentlen
