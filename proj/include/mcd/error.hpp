#pragma once

#include <stdexcept>
#include <string>

namespace mcd {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Data (or a candidate subsample) concentrates on a hyperplane: the trimmed
// covariance is singular and the determinant objective collapses to zero.
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

// A solver-side optimality certificate failed.
struct CertificateError : Error {
  explicit CertificateError(const std::string& msg) : Error(msg) {}
};

}  // namespace mcd
