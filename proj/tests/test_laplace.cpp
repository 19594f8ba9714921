#include <doctest.h>

#include <cmath>
#include <numbers>

#include <gsl/gsl_integration.h>

#include "hankelspec/errors.hpp"
#include "hankelspec/laplace.hpp"

using namespace hankelspec;

namespace {

struct LaplaceArgs {
  PiecewiseFn sigma;
  double t;
  double alpha;
};

double laplace_integrand(double lam, void* p) {
  const auto* a = static_cast<LaplaceArgs*>(p);
  return a->sigma(lam) * std::exp(-lam * a->t);
}

double gsl_laplace(const PiecewiseFn& sigma, double t) {
  LaplaceArgs args{sigma, t, 0};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  gsl_function F{laplace_integrand, &args};
  double pts[] = {0, 0.25, 0.5, 2, 4};
  double a = 0, b = 0, err = 0;
  gsl_integration_qagp(&F, pts, 5, 0, 1e-13, 4000, w, &a, &err);
  gsl_integration_qagiu(&F, 4, 0, 1e-13, 4000, w, &b, &err);
  gsl_integration_workspace_free(w);
  return a + b;
}

double ratio_integrand(double lam, void* p) {
  const auto* a = static_cast<LaplaceArgs*>(p);
  return std::pow(-std::log(lam), -a->alpha) * std::exp(-lam * a->t);
}

const std::vector<double> kDecadesUp{1e2, 1e3, 1e4, 1e5, 1e6};
const std::vector<double> kDecadesDown{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

}  // namespace

TEST_CASE("exact transforms") {
  PiecewiseFn one{[](double) { return 1.0; }, {}};
  PiecewiseFn ex{[](double l) { return std::exp(-l); }, {}};
  for (double t : {1e-3, 0.1, 1.0, 7.0, 1e3}) {
    const auto r = laplace_transform(one, t);
    CHECK(r.converged);
    CHECK(std::abs(r.value * t - 1) < 1e-10);
    CHECK(std::abs(laplace_transform(ex, t).value * (t + 1) - 1) < 1e-10);
    for (int m : {1, 2, 3}) {
      PiecewiseFn pw{[m](double l) { return std::pow(l, m); }, {}};
      const double exact = std::tgamma(m + 1.0) / std::pow(t, m + 1);
      CHECK(std::abs(laplace_transform(pw, t).value / exact - 1) < 1e-10);
    }
  }
  CHECK_THROWS_AS(laplace_transform(one, 0), ValidationError);
}

TEST_CASE("model transform against an independent quadrature") {
  const auto sigma = sigma_star({1, 1, 1}, smooth_cutoffs());
  for (double t : {0.3, 1.0, 10.0}) {
    const auto r = laplace_transform(sigma, t);
    CHECK(r.abs_error <= 1e-9 * std::abs(r.value));
    CHECK(r.value == doctest::Approx(gsl_laplace(sigma, t)).epsilon(1e-9));
  }
}

TEST_CASE("model transform follows t^-1 |log t|^-1 at both ends") {
  const auto sigma = sigma_star({1, 1, 1}, smooth_cutoffs());
  for (const auto* list : {&kDecadesUp, &kDecadesDown}) {
    double prev = INFINITY;
    for (double t : *list) {
      const double lt = std::abs(std::log(t));
      const double dev = std::abs(laplace_transform(sigma, t).value * t * lt - 1);
      CHECK(dev <= 3 / lt);
      CHECK(dev < prev);
      prev = dev;
    }
  }
}

TEST_CASE("tabulated kernel matches direct transforms") {
  const auto sigma = sigma_star({1, 1, 0.5}, smooth_cutoffs());
  const auto k = tabulated_laplace_kernel(sigma, -6, 6, 1.0 / 512);
  for (double u = -5.9; u < 6; u += 0.37) {
    const double t = std::exp(u);
    CHECK(k(t) == doctest::Approx(laplace_transform(sigma, t).value).epsilon(1e-11));
  }
  CHECK(k(std::exp(8.0)) == doctest::Approx(laplace_transform(sigma, std::exp(8.0)).value).epsilon(1e-13));
}

TEST_CASE("large-t integral I_m") {
  const auto tab = lemma_L_check(1, 0, 0.5, kDecadesUp);
  CHECK(tab.monotone());
  CHECK(tab.within_bounds());
  CHECK(tab.rows.back().deviation <= 3 / std::log(1e6));

  LaplaceArgs args{{}, 100, 1};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  gsl_function F{ratio_integrand, &args};
  double oracle = 0, err = 0;
  gsl_integration_qags(&F, 0, 0.5, 0, 1e-12, 4000, w, &oracle, &err);
  gsl_integration_workspace_free(w);
  CHECK(tab.rows.front().value == doctest::Approx(oracle).epsilon(1e-9));

  // For alpha = 2 the deviation first grows (0.072 at 1e2, 0.080 at 1e3),
  // then improves.
  const auto a2 = lemma_L_check(2, 0, 0.5, {1e3, 1e4, 1e5, 1e6});
  CHECK(a2.monotone());
  CHECK(a2.within_bounds());

  // I_1 / I_0 ~ 1/t
  const auto one = lemma_L_check(1, 1, 0.5, {1e6});
  const auto zero = lemma_L_check(1, 0, 0.5, {1e6});
  CHECK(std::abs(one.rows[0].value / zero.rows[0].value * 1e6 - 1) <= 3 / std::log(1e6));

  CHECK_THROWS_AS(lemma_L_check(1, 0, 0.5, {5}), ValidationError);
  CHECK_THROWS_AS(lemma_L_check(1, 0, 0.5, {1e3, 1e2}), ValidationError);
  CHECK_THROWS_AS(lemma_L_check(1, 0, 1.5, {1e3}), ValidationError);
}

TEST_CASE("small-t integral I_m") {
  const auto tab = lemma_M_check(1, 0, 2, kDecadesDown);
  CHECK(tab.monotone());
  CHECK(tab.rows.back().deviation <= 3 / std::log(1e6));
  const auto a2 = lemma_M_check(2, 0, 2, {1e-2, 1e-4, 1e-6});
  CHECK(a2.monotone());
  CHECK(a2.rows.back().deviation <= 3 / std::log(1e6));
  CHECK_THROWS_AS(lemma_M_check(1, 0, 0.5, {1e-3}), ValidationError);
}

TEST_CASE("model kernel residual") {
  const auto c = smooth_cutoffs();
  const auto zero = model_kernel_residual({1, 0, 0}, c, {1e-3, 1, 1e3});
  for (const auto& r : zero.rows) CHECK(r.residual == 0.0);

  // calibrated max 0.4583 over t in {1e2, ..., 1e6}
  const auto tab = model_kernel_residual({1, 0, 1}, c, {1e2, 1e4, 1e6});
  CHECK(tab.max_normalized() <= 0.504);
  const auto mid = model_kernel_residual({1, 1, 1}, c, {2, 2.5, 3, 3.5, 4});
  for (const auto& r : mid.rows) CHECK(std::isfinite(r.residual));
  // linear in (b0, binf)
  const auto lo = model_kernel_residual({1, 1, 0}, c, {2, 2.5, 3, 3.5, 4});
  const auto hi = model_kernel_residual({1, 0, 1}, c, {2, 2.5, 3, 3.5, 4});
  for (std::size_t i = 0; i < mid.rows.size(); ++i)
    CHECK(mid.rows[i].residual ==
          doctest::Approx(lo.rows[i].residual + hi.rows[i].residual).epsilon(1e-10));
}

TEST_CASE("moment residual and parity split") {
  const auto c = smooth_cutoffs();
  const auto zero = moment_residual({1, 0, 0}, c, {16, 64});
  for (const auto& r : zero.rows) {
    CHECK(r.value == 0.0);
    CHECK(r.residual == 0.0);
    CHECK(r.residual_odd == 0.0);
  }

  std::vector<long> js;
  for (long j = 16; j <= 4096; j *= 2) js.push_back(j);
  // calibrated max 0.3939
  CHECK(moment_residual({1, 1, 0}, c, js).max_normalized() <= 0.4333);

  // Only the alternating coefficient: the [0, 1) half vanishes identically.
  const auto odd = moment_residual({1, 0, 1}, c, {16, 17, 32, 33});
  for (const auto& r : odd.rows) {
    CHECK(r.normalized == 0.0);
    const double j = r.x;
    CHECK(r.value == doctest::Approx((std::fmod(j, 2) == 0 ? 1 : -1) * (r.residual_odd + 1 / (j * std::log(j)))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(moment_residual({1, 1, 0}, c, {8}), ValidationError);
}

TEST_CASE("moments of eta* agree with a Laplace transform") {
  // For bm1 = 0, mu = exp(-lambda) turns the moment into the transform of
  // sigma1(lambda) = eta*(exp(-lambda)) exp(-lambda).
  const auto eta = eta_star({1, 1, 0}, smooth_cutoffs());
  PiecewiseFn sigma1{[eta](double l) {
                       const double mu = std::exp(-l);
                       return mu < 1 ? eta(mu) * mu : 0.0;
                     },
                     {-std::log(7.0 / 9), -std::log(0.6)}};
  for (std::int64_t j : {4, 16, 64, 256}) {
    const double m = moment(eta, j).value;
    CHECK(laplace_transform(sigma1, static_cast<double>(j)).value == doctest::Approx(m).epsilon(1e-8));
  }
}
