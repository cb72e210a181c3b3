#pragma once

#include <stdexcept>
#include <string>

namespace dipolar {

// Raised when a numerical procedure (quadrature, root finding, eigensolver)
// fails to reach its tolerance. Invalid inputs raise std::domain_error instead.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dipolar
