#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include "hankelspec/asymptotics.hpp"
#include "hankelspec/errors.hpp"

using namespace hankelspec;
using std::numbers::pi;

namespace {

struct BetaArgs {
  double a, b;
};

// B(a, b) = int_1^inf (t - 1)^(a - 1) t^(-a - b) dt
double beta_integrand(double t, void* p) {
  const auto* ab = static_cast<BetaArgs*>(p);
  return std::pow(t - 1, ab->a - 1) * std::pow(t, -ab->a - ab->b);
}

double beta_by_integral(double a, double b) {
  BetaArgs args{a, b};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  gsl_function F{beta_integrand, &args};
  double r1 = 0, r2 = 0, err = 0;
  gsl_set_error_handler_off();
  gsl_integration_qags(&F, 1, 2, 0, 1e-11, 2000, w, &r1, &err);
  gsl_integration_qagiu(&F, 2, 0, 1e-11, 2000, w, &r2, &err);
  gsl_integration_workspace_free(w);
  return r1 + r2;
}

}  // namespace

TEST_CASE("Beta function") {
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(beta_fn(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta_fn(1, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  for (double a : {0.25, 0.7, 1.5, 3.0})
    for (double b : {0.5, 1.2, 2.5})
      CHECK(beta_fn(a, b) == doctest::Approx(beta_by_integral(a, b)).epsilon(1e-9));
  CHECK(std::isfinite(beta_fn(300, 300)));
  CHECK(beta_fn(300, 300) == doctest::Approx(gsl_sf_beta(300, 300)).epsilon(1e-10));
  CHECK_THROWS_AS(beta_fn(0, 1), ValidationError);
}

TEST_CASE("v(alpha)") {
  CHECK(std::abs(v_alpha(1) - 0.5) < 1e-15);
  CHECK(std::abs(v_alpha(0.5) - 1) < 1e-15);
  // 2^-2 pi^-3 B(1/4, 1/2)^2, reference value from a 40-digit evaluation
  CHECK(v_alpha(2) == doctest::Approx(0.22173529214452885135).epsilon(1e-14));
  CHECK(v_alpha(3) == doctest::Approx(0.15798634679788315431).epsilon(1e-14));
  for (double a : {0.3, 0.8, 1.7, 4.0}) {
    const double ref = std::pow(2, -a) * std::pow(pi, 1 - 2 * a) * std::pow(gsl_sf_beta(1 / (2 * a), 0.5), a);
    CHECK(v_alpha(a) == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK_THROWS_AS(v_alpha(0), ValidationError);
}

TEST_CASE("discrete and continuous coefficients") {
  auto r = c_pm_discrete({1, 1, 0});
  CHECK(r.c_plus == doctest::Approx(0.5));
  CHECK(r.c_minus == 0.0);
  CHECK(c_pm_discrete({1, 1, 1}).c_plus == doctest::Approx(1.0));
  r = c_pm_discrete({1, 0.7, -0.7});
  CHECK(r.c_plus == doctest::Approx(0.35));
  CHECK(r.c_minus == doctest::Approx(0.35));
  CHECK(c_pm_continuous({1, 1, 0}).c_plus == doctest::Approx(0.5));
  r = c_pm_continuous({2, 0, 0});
  CHECK(r.c_plus == 0.0);
  CHECK(r.c_minus == 0.0);
  r = c_pm_continuous({1, -1, 2});
  CHECK(r.c_plus == doctest::Approx(1.0));
  CHECK(r.c_minus == doctest::Approx(0.5));
  CHECK(r.inputs["b0"] == -1.0);
}

TEST_CASE("coefficient invariants") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3), a(0.2, 4), s(0.1, 10);
  for (int trial = 0; trial < 20; ++trial) {
    const AsymDiscrete p{a(rng), u(rng), u(rng)};
    const double k = s(rng);
    const auto base = c_pm_discrete(p);
    const auto scaled = c_pm_discrete({p.alpha, k * p.b1, k * p.bm1});
    CHECK(scaled.c_plus == doctest::Approx(k * base.c_plus).epsilon(1e-13));
    CHECK(scaled.c_minus == doctest::Approx(k * base.c_minus).epsilon(1e-13));
    const auto swapped = c_pm_discrete({p.alpha, p.bm1, p.b1});
    CHECK(swapped.c_plus == doctest::Approx(base.c_plus).epsilon(1e-15));
    CHECK(swapped.c_minus == doctest::Approx(base.c_minus).epsilon(1e-15));
    const auto neg = c_pm_discrete({p.alpha, -p.b1, -p.bm1});
    CHECK(neg.c_plus == doctest::Approx(base.c_minus).epsilon(1e-15));
    CHECK(base.c_plus >= 0);
    CHECK(base.c_minus >= 0);
  }
}

TEST_CASE("matrix coefficients") {
  Eigen::MatrixXcd one(1, 1), two(1, 1);
  one << 0.8;
  two << -1.7;
  const auto m = c_pm_matrix(one, two, 1.3);
  const auto c = c_pm_continuous({1.3, 0.8, -1.7});
  CHECK(m.c_plus == doctest::Approx(c.c_plus).epsilon(1e-15));
  CHECK(m.c_minus == doctest::Approx(c.c_minus).epsilon(1e-15));

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2), zero = Eigen::MatrixXcd::Zero(2, 2);
  CHECK(c_pm_matrix(id, zero, 1).c_plus == doctest::Approx(1.0));
  Eigen::MatrixXcd split = Eigen::MatrixXcd::Zero(2, 2);
  split(0, 0) = 1;
  split(1, 1) = -1;
  CHECK(c_pm_matrix(split, zero, 1).c_plus == doctest::Approx(0.5));
  CHECK(c_pm_matrix(split, zero, 1).c_minus == doctest::Approx(0.5));

  // Diagonal input: the trace sums the scalar roots blockwise.
  Eigen::MatrixXcd d0 = Eigen::MatrixXcd::Zero(3, 3), d1 = Eigen::MatrixXcd::Zero(3, 3);
  d0.diagonal() << 2, -0.5, 0.3;
  d1.diagonal() << -1, 4, 0;
  const double alpha = 0.7;
  double sp = 0, sm = 0;
  for (int i = 0; i < 3; ++i)
    for (double x : {d0(i, i).real(), d1(i, i).real()}) {
      sp += positive_part_root(x, alpha);
      sm += positive_part_root(-x, alpha);
    }
  const auto dm = c_pm_matrix(d0, d1, alpha);
  CHECK(dm.c_plus == doctest::Approx(v_alpha(alpha) * std::pow(sp, alpha)).epsilon(1e-13));
  CHECK(dm.c_minus == doctest::Approx(v_alpha(alpha) * std::pow(sm, alpha)).epsilon(1e-13));

  // Unitary conjugation leaves the functional calculus unchanged.
  Eigen::MatrixXcd q(3, 3);
  q << 1, std::complex<double>(0, 1), 0, std::complex<double>(0, 1), 1, 1, 0, 1, std::complex<double>(1, -1);
  const Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(q).householderQ();
  const auto rot = c_pm_matrix(U * d0 * U.adjoint(), d1, alpha);
  CHECK(rot.c_plus == doctest::Approx(dm.c_plus).epsilon(1e-12));

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(c_pm_matrix(bad, zero, 1), ValidationError);
  CHECK_THROWS_AS(c_pm_matrix(id, Eigen::MatrixXcd::Zero(3, 3), 1), ValidationError);
}

TEST_CASE("M(alpha) and the Widom exponent") {
  CHECK(m_alpha(0.3) == 0);
  CHECK(m_alpha(0.5) == 1);
  CHECK(m_alpha(1) == 2);
  CHECK(m_alpha(2.5) == 3);
  CHECK(widom_exponent(2, 8) == doctest::Approx(17.772).epsilon(1e-4));
  CHECK(widom_exponent(2, 8) == doctest::Approx(pi * std::sqrt(32.0)).epsilon(1e-15));
  CHECK_THROWS_AS(widom_exponent(2, 0), ValidationError);
  CHECK_THROWS_AS(widom_exponent(1, 3), ValidationError);
}
