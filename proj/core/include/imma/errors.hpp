#pragma once

#include <stdexcept>
#include <string>

namespace imma {

// Malformed input data (edge lists, config files).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A constructor or operation was handed values outside its documented domain.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A caller broke an API precondition that valid inputs cannot trigger.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace imma
