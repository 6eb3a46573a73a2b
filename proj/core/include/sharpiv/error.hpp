#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sharpiv {

/// Bad input: malformed files, out-of-domain arguments, degenerate designs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed (bracket not found, quadrature did not converge).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics accumulated alongside a result.
using Warnings = std::vector<std::string>;

void append_warnings(Warnings& into, const Warnings& from);

}  // namespace sharpiv
