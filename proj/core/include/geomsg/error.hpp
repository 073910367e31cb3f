#pragma once

#include <string>
#include <stdexcept>

namespace geomsg {

// Domain error categories shared by all modules. The CLI maps usage and
// parse failures to exit status 2 and everything else to 1.
enum class Errc {
  validation,
  parse,
  precision,
  not_found,
  config,
  length,
  storage,
  authorization,
  access,
  discovery,
  positioning,
  flow_closed,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Thrown by the SMS composer; carries how many characters the body is over.
class LengthError : public Error {
 public:
  LengthError(const std::string& what, std::size_t length, std::size_t limit)
      : Error(Errc::length, what), length_(length), limit_(limit) {}

  std::size_t length() const noexcept { return length_; }
  std::size_t limit() const noexcept { return limit_; }
  std::size_t overflow() const noexcept { return length_ - limit_; }

 private:
  std::size_t length_;
  std::size_t limit_;
};

}  // namespace geomsg
