#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <gsl/gsl_integration.h>

#include "hankelspec/errors.hpp"
#include "hankelspec/kernels.hpp"

using namespace hankelspec;
using std::numbers::e;

TEST_CASE("model_sequence closed form") {
  const auto h = model_sequence({1, 1, 0});
  CHECK(h(0) == 0.0);
  CHECK(h(1) == 0.0);
  CHECK(h(3) == doctest::Approx(0.30341).epsilon(1e-4));
  CHECK(h(3) == doctest::Approx(1 / (3 * std::log(3.0))).epsilon(1e-15));

  const auto z = model_sequence({1, 0, 0});
  for (int j = 0; j < 50; ++j) CHECK(z(j) == 0.0);

  const auto s = model_sequence({1, 1, 1});
  CHECK(s(3) == 0.0);
  CHECK(s(4) == doctest::Approx(2 / (4 * std::log(4.0))));

  CHECK_THROWS_AS(model_sequence({NAN, 1, 0}), ValidationError);
  CHECK_THROWS_AS(model_sequence({1, INFINITY, 0}), ValidationError);
  CHECK_THROWS_AS(model_sequence({-1, 1, 0}), ValidationError);
}

TEST_CASE("parity decomposition of the model sequence") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2), a(0.2, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const AsymDiscrete p{a(rng), u(rng), u(rng)};
    const auto h = model_sequence(p);
    for (std::int64_t j = 2; j < 200; ++j) {
      const double m = 1 / (j * std::pow(std::log(double(j)), p.alpha));
      const double expect = p.b1 * m + (j % 2 ? -1.0 : 1.0) * p.bm1 * m;
      CHECK(std::abs(h(j) - expect) <= 1e-15 * std::abs(m) * (std::abs(p.b1) + std::abs(p.bm1)));
    }
  }
}

TEST_CASE("overrides replace head values") {
  const auto h = model_sequence({1, 1, 0}).with_overrides({{0, 2.5}, {1, -1}});
  CHECK(h(0) == 2.5);
  CHECK(h(1) == -1);
  CHECK(h(2) == doctest::Approx(1 / (2 * std::log(2.0))));
  CHECK(to_json(h)["overrides"].size() == 2);
  CHECK_THROWS_AS(model_sequence({1, 1, 0}).with_overrides({{1, 1}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(h(-1), ValidationError);
}

TEST_CASE("model kernels h0 and hinf") {
  const auto c = smooth_cutoffs();
  const auto [h0, hinf] = model_kernels_h0_hinf(1, c);
  CHECK(h0(1.0 / 8) == doctest::Approx(3.8473).epsilon(1e-4));
  CHECK(h0(1.0 / 8) == doctest::Approx(8 / std::log(8.0)).epsilon(1e-15));
  CHECK(hinf(1.0 / 8) == 0.0);
  CHECK(h0(8.0) == 0.0);
  const auto [g0, ginf] = model_kernels_h0_hinf(2, c);
  CHECK(ginf(std::exp(8.0)) == doctest::Approx(std::exp(-8.0) / 64).epsilon(1e-14));
  for (double t : {2.0, 2.5, 3.0, 3.5, 4.0}) CHECK(std::isfinite(hinf(t)));
}

TEST_CASE("sigma_star values and coefficient swap") {
  const auto c = smooth_cutoffs();
  CHECK(sigma_star({1, 0, 1}, c)(1.0 / 8) == doctest::Approx(0.48089).epsilon(1e-4));
  CHECK(sigma_star({1, 0, 1}, c)(1.0 / 8) == doctest::Approx(1 / std::log(8.0)).epsilon(1e-15));
  CHECK(sigma_star({1, 1, 0}, c)(std::exp(5.0)) == doctest::Approx(0.2).epsilon(1e-15));
  for (double l : {0.51, 0.8, 1.0, 1.5, 1.99}) CHECK(sigma_star({1.3, 2, -1}, c)(l) == 0.0);
  CHECK_THROWS_AS(sigma_star({1, 1, 1}, c)(0.0), ValidationError);
  CHECK_THROWS_AS(sigma_star({1, 1, 1}, c)(-1.0), ValidationError);
}

TEST_CASE("cutoffs: plateaus, range, mirror symmetry, flat derivatives") {
  const auto c = smooth_cutoffs();
  CHECK(c.chi0(0.2) == 1.0);
  CHECK(c.chi0(0.25) == 1.0);
  CHECK(c.chi0(0.5) == 0.0);
  CHECK(c.chi0(7.0) == 0.0);
  CHECK(c.chiinf(2.0) == 0.0);
  CHECK(c.chiinf(4.0) == 1.0);
  CHECK(c.chiinf(3) > 0.0);
  CHECK(c.chiinf(3) < 1.0);
  CHECK(c.chi0(0.375) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x = 0.01; x < 1; x += 0.01) CHECK(smooth_step(x) + smooth_step(1 - x) == doctest::Approx(1.0).epsilon(1e-15));
  for (double t = 0.26; t < 0.5; t += 0.01) CHECK(c.chi0(t) + c.chi0(0.75 - t) == doctest::Approx(1.0).epsilon(1e-14));
  for (double t = 1e-3; t < 10; t *= 1.1) {
    CHECK(c.chi0(t) >= 0.0);
    CHECK(c.chi0(t) <= 1.0);
    CHECK(c.chiinf(t) >= 0.0);
    CHECK(c.chiinf(t) <= 1.0);
  }
  const double h = 1e-4;
  for (double t : {0.1, 0.2, 0.6, 1.0, 1.9, 4.5, 9.0}) {
    CHECK(std::abs(c.chi0(t + h) - c.chi0(t - h)) / (2 * h) < 1e-12);
    CHECK(std::abs(c.chiinf(t + h) - c.chiinf(t - h)) / (2 * h) < 1e-12);
  }
}

TEST_CASE("eta_star values") {
  const auto c = smooth_cutoffs();
  CHECK(eta_star({1, 3, -2}, c)(0.0) == 0.0);
  const double mu = (2 * e * e - 1) / (2 * e * e + 1);
  CHECK(eta_argument(mu) == doctest::Approx(e * e).epsilon(1e-14));
  CHECK(eta_star({1, 1, 0}, c)(mu) == doctest::Approx(0.5).epsilon(1e-14));
  for (double m = -0.99; m < 1; m += 0.01) CHECK(eta_star({1, 0, 0}, c)(m) == 0.0);
  CHECK_THROWS_AS(eta_star({1, 1, 0}, c)(1.0), ValidationError);
  CHECK_THROWS_AS(eta_star({1, 1, 0}, c)(-1.0), ValidationError);
}

// mu -> -mu sends the cutoff argument x to 1/(4x): it swaps the two plateaus
// (x >= 4 <-> x <= 1/16 is inside chi0's plateau) but not |log x|, so the
// exchange of b1 and bm1 is an identity only up to the factor
// |log x| / |log(1/(4x))|, which tends to 1 at the endpoints.
TEST_CASE("eta_star under mu -> -mu") {
  for (double mu = -0.99; mu < 0.995; mu += 0.013)
    CHECK(eta_argument(-mu) == doctest::Approx(1 / (4 * eta_argument(mu))).epsilon(1e-12));
  const auto c = smooth_cutoffs();
  const auto a = eta_star({1, 1, 0.5}, c);
  const auto b = eta_star({1, 0.5, 1}, c);
  for (double mu : {0.9, 0.99, 0.9999, 0.999999}) {
    const double x = eta_argument(mu);
    const double expect = std::log(4 * x) / std::log(x);
    CHECK(a(mu) / b(-mu) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(a(0.999999) / b(-0.999999) == doctest::Approx(1.0).epsilon(0.1));
}

namespace {
struct EtaRef {
  PiecewiseFn eta;
  int j;
};
double eta_power(double mu, void* p) {
  auto* r = static_cast<EtaRef*>(p);
  return r->eta(mu) * std::pow(mu, r->j);
}
}  // namespace

TEST_CASE("moments: polynomial weights and independent oracle") {
  PiecewiseFn one{[](double) { return 1.0; }, {}};
  CHECK(moment(one, 0).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(moment(one, 1).value) < 1e-12);
  PiecewiseFn sq{[](double m) { return m * m; }, {}};
  CHECK(moment(sq, 2).value == doctest::Approx(0.4).epsilon(1e-12));
  for (int j = 0; j < 12; ++j) {
    const double exact = j % 2 ? 0.0 : 2.0 / (j + 3);
    CHECK(std::abs(moment(sq, j).value - exact) < 1e-12);
  }

  EtaRef ref{eta_star({1, 1, 0}, smooth_cutoffs()), 10};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(4000);
  gsl_function F{eta_power, &ref};
  double pts[] = {-1, -1.0 / 3, 0, 0.6, 7.0 / 9, 1};
  double oracle = 0, err = 0;
  gsl_integration_qagp(&F, pts, 6, 1e-14, 1e-12, 4000, w, &oracle, &err);
  gsl_integration_workspace_free(w);
  const auto h = moments(ref.eta, 16);
  CHECK(h(10) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(h(20) == doctest::Approx(moment(ref.eta, 20).value).epsilon(1e-15));
}

TEST_CASE("json round trips") {
  const auto h = discrete_kernel_from_json({{"type", "discrete_model"}, {"alpha", 1}, {"b1", 1}, {"bm1", 0.5}});
  CHECK(h(5) == model_sequence({1, 1, 0.5})(5));
  CHECK(discrete_kernel_from_json(to_json(h))(7) == h(7));
  CHECK(discrete_kernel_from_json({{"type", "hilbert"}})(2) == doctest::Approx(1.0 / 3));
  CHECK(discrete_kernel_from_json({{"type", "power"}, {"gamma", 2}})(1) == doctest::Approx(0.25));
  CHECK(discrete_kernel_from_json({{"type", "delta"}})(0) == 1.0);
  CHECK(discrete_kernel_from_json({{"type", "sequence"}, {"values", {1, 2}}})(5) == 0.0);
  const auto k = continuous_kernel_from_json({{"type", "continuous_model"}, {"alpha", 1}, {"b0", 1}, {"binf", 0}});
  CHECK(k(1.0 / 8) == doctest::Approx(8 / std::log(8.0)));
  CHECK(continuous_kernel_from_json({{"type", "carleman"}})(4.0) == 0.25);
  CHECK_THROWS_AS(discrete_kernel_from_json({{"type", "nope"}}), ValidationError);
  CHECK_THROWS_AS(to_json(DiscreteKernel([](std::int64_t) { return 0.0; })), ValidationError);
}

TEST_CASE("block kernels") {
  Eigen::MatrixXcd m(2, 2);
  m << 1, std::complex<double>(0, 1), std::complex<double>(0, -1), 2;
  const auto k = tensor_block_kernel(m, model_sequence({1, 1, 0}));
  CHECK((k(3) - m * model_sequence({1, 1, 0})(3)).norm() == 0.0);
  BlockKernel bad{[](std::int64_t) { Eigen::MatrixXcd x(2, 2); x << 1, 1, 0, 1; return x; }, 2};
  CHECK_THROWS_AS(bad(0), ValidationError);
  BlockKernel wrong{[](std::int64_t) { return Eigen::MatrixXcd::Identity(3, 3).eval(); }, 2};
  CHECK_THROWS_AS(wrong(0), ValidationError);
}
