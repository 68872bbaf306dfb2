#pragma once

#include <stdexcept>
#include <string>

namespace rsel {

// Raised when a numeric routine receives arguments outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised for invalid experiment configuration; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// File-system failures; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsel
