#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <gsl/gsl_integration.h>

#include "hankelspec/errors.hpp"
#include "hankelspec/quadrature.hpp"

using namespace hankelspec;

namespace {

double gsl_qags(double (*f)(double, void*), void* params, double a, double b) {
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  gsl_function F{f, params};
  double result = 0, err = 0;
  gsl_integration_qags(&F, a, b, 0, 1e-13, 2000, w, &result, &err);
  gsl_integration_workspace_free(w);
  return result;
}

double log_weighted(double x, void*) { return std::log(x) * std::cos(3 * x); }

}  // namespace

TEST_CASE("polynomials and exponentials are exact") {
  CHECK(integrate([](double x) { return x * x; }, 0, 1).value == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const auto r = integrate([](double x) { return std::exp(-x); }, 0, 30);
  CHECK(std::abs(r.value - (1 - std::exp(-30.0))) < 1e-14);
  CHECK(r.converged);
}

TEST_CASE("endpoint log singularity against QAGS") {
  const auto r = integrate([](double x) { return std::log(x) * std::cos(3 * x); }, 0, 2);
  CHECK(r.converged);
  CHECK(std::abs(r.value - gsl_qags(log_weighted, nullptr, 0, 2)) < 1e-11);
}

TEST_CASE("break points are respected") {
  std::vector<double> pts{-1, 0, 1};
  const auto r = integrate([](double x) { return std::abs(x); }, pts);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.panels == 2);
}

TEST_CASE("panel budget exhaustion is reported") {
  QuadOptions o;
  o.max_panels = 3;
  o.rel_tol = 1e-15;
  const auto r = integrate([](double x) { return std::sin(1 / x); }, 1e-4, 1, o);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(throw_if_unconverged(r, "oscillatory"), ConvergenceError);
}

TEST_CASE("reversed and empty intervals") {
  CHECK(integrate([](double) { return 1.0; }, 2, 2).value == 0.0);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1, 0), ValidationError);
}
