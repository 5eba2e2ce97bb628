#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace sialign {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, broken invariants, contaminated splits. CLI exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Missing files, unreadable input. CLI exit status 2.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file content; the message names the file and the 1-based line.
class ParseError : public IoError {
 public:
  ParseError(const std::filesystem::path& file, long line, const std::string& what)
      : IoError(file.string() + ":" + std::to_string(line) + ": " + what),
        file_(file), line_(line) {}

  const std::filesystem::path& file() const { return file_; }
  long line() const { return line_; }

 private:
  std::filesystem::path file_;
  long line_;
};

}  // namespace sialign
