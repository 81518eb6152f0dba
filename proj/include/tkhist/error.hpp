#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkhist {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the SQL front end; offset is the byte position of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace tkhist
