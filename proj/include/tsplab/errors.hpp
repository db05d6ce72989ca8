#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsplab {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Requested problem size exceeds what an exhaustive routine accepts.
struct UnsupportedSize : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A softmax row normalized to zero or a nonfinite value.
struct DegenerateTemperature : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoCandidate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// k-opt action that does not describe a single Hamiltonian cycle.
struct InvalidAction : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct UndefinedScore : std::domain_error {
  using std::domain_error::domain_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file content. `line` is 1-based, 0 when not line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tsplab
