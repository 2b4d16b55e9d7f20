#pragma once

#include <stdexcept>
#include <string>

namespace fermitherm {

/// A precondition on user-supplied input was violated (bad range, dimension
/// mismatch, non-Hermitian matrix, ...).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical engine could not produce the requested result, e.g. the
/// population never crossed its target before the time limit.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fermitherm
