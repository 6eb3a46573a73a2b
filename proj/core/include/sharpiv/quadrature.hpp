#pragma once

#include <functional>
#include <vector>

namespace sharpiv {

/// Adaptive Gauss–Kronrod integral of f over [a, b] (finite limits), split at
/// any `breaks` inside the interval. Throws NumericalError when the error
/// estimate exceeds abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& breaks = {}, double abs_tol = 1e-9);

/// ∫_a^b f(x) φ(x) dx for the standard normal density φ. Infinite limits are
/// allowed; the range is truncated to |x| ≤ 12, where the Gaussian tail is
/// below 1e-32.
double gaussian_integral(const std::function<double(double)>& f, double a, double b,
                         const std::vector<double>& breaks = {}, double abs_tol = 1e-9);

}  // namespace sharpiv
