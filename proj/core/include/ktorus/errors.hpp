#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace ktorus {

/// Bad inputs or broken type invariants (maps to CLI exit code 1).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric check failed beyond tolerance (maps to CLI exit code 2).
/// Optionally carries the integer node where the check failed worst.
class check_failure : public std::runtime_error {
 public:
  explicit check_failure(const std::string& what) : std::runtime_error(what) {}
  check_failure(const std::string& what, std::array<int, 2> node)
      : std::runtime_error(what), node_(node), has_node_(true) {}

  bool has_node() const { return has_node_; }
  std::array<int, 2> node() const { return node_; }

 private:
  std::array<int, 2> node_{0, 0};
  bool has_node_ = false;
};

/// Filesystem / parse failures (maps to CLI exit code 3).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ktorus
