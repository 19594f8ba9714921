#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hankelspec {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

/// Outcome of an adaptive integration; `converged` is false when the panel
/// budget ran out before the error estimate met the tolerance.
struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int panels = 0;
  int evaluations = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& other);
};

/// Globally adaptive 15-point Gauss-Kronrod integration over [points.front(),
/// points.back()], starting from one panel per consecutive pair of points.
/// Interior points should sit where the integrand changes character.
QuadResult integrate(const std::function<double(double)>& f,
                     std::span<const double> points, const QuadOptions& opts = {});

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

/// Throws ConvergenceError carrying the panel diagnostics when `r` did not converge.
void throw_if_unconverged(const QuadResult& r, const char* what);

}  // namespace hankelspec
