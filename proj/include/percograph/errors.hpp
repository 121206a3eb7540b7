#pragma once

#include <stdexcept>
#include <string>

namespace percograph {

// Precondition violations throw std::invalid_argument. Numeric-domain failures
// (divergent expectations, non-convergence, wrong phase) throw DomainError so
// callers such as the CLI can map them to a distinct exit status.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace percograph
