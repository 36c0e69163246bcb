#pragma once

#include <stdexcept>
#include <string>

namespace asplat {

/// Input outside the mathematical domain of an operation (non-PSD covariance,
/// non-positive sigma, mismatched image sizes, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested combination is valid input but has no implementation, e.g.
/// backward through a forward-only shading scheme.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed scene, camera, or image file. The message names the offending field.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace asplat
