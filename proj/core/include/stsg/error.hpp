#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stsg {

// All engine errors carry a stable machine-readable code ("missing-binding:sentence",
// "unknown-field", "config:missing:gateway", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Model output did not match the expected grammar. Carries the payload kind
// and the offending text so the caller can decide to retry or skip.
class ParseError : public Error {
 public:
  ParseError(std::string kind, std::string text, const std::string& message)
      : Error("parse:" + kind, message), kind_(std::move(kind)), text_(std::move(text)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& offending_text() const noexcept { return text_; }

 private:
  std::string kind_;
  std::string text_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error("transport", message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_ = 0;
};

}  // namespace stsg
