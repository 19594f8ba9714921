#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hankelspec/kernels.hpp"
#include "hankelspec/spectra.hpp"

namespace hankelspec {

using Symbol = std::function<double(double)>;

/// b(x) = (pi / cosh(pi x))^(1/2).
double weight_b(double x);

/// s(xi) = sigma(exp(-xi)).
Symbol symbol_from_sigma(const PiecewiseFn& sigma);

/// s(xi) = eta((2 exp(-xi) - 1) / (2 exp(-xi) + 1)).
Symbol symbol_from_eta(const PiecewiseFn& eta);

class PsdoFft;

/// Composed symbol of the continuous model operator,
/// s*(xi) = binf |xi|^-alpha chi0(e^-xi) + b0 |xi|^-alpha chiinf(e^-xi); equal to
/// symbol_from_sigma(sigma_star(p, c)) but free of exp/log round trips.
Symbol symbol_star(const AsymContinuous& p, const CutoffPair& c);

/// Composed symbol of the discrete model operator,
/// s*(xi) = |xi|^-alpha (b1 chiinf(e^-xi) + bm1 chi0(e^-xi)).
Symbol symbol_eta_star(const AsymDiscrete& p, const CutoffPair& c);

/// Psi = b(X) s(D) b(X) on a periodic grid x_i = -X + 2 X i / M, realized as
/// u -> b . IDFT[s(xi_m) . DFT[b . u]] with xi_m = 2 pi m / (2 X).
class PsdoModel {
 public:
  double x_half() const { return x_half_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& grid() const { return x_; }
  const std::vector<double>& weight_samples() const { return b_; }
  const std::vector<double>& frequencies() const { return xi_; }
  const std::vector<double>& symbol_samples() const { return s_; }
  /// Set when |s| at the Nyquist frequency exceeds 1e-6 max|s|.
  bool aliasing_warning() const { return aliasing_; }

  /// Psi acts on complex grid functions: s(D) does not preserve real-valuedness
  /// unless the symbol is even.
  void apply(std::span<const std::complex<double>> u, std::span<std::complex<double>> out) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  ComplexLinearMap linear_map() const;

 private:
  friend PsdoModel build_psdo(const Symbol&, double, std::size_t);

  double x_half_ = 0.0;
  std::vector<double> x_, b_, xi_, s_;
  bool aliasing_ = false;
  std::shared_ptr<const PsdoFft> fft_;
};

/// M must be a power of two, x_half > 0.
PsdoModel build_psdo(const Symbol& symbol, double x_half, std::size_t m);

struct WeylOptions {
  /// Half-width of the x window scanned for the level sets of weight2.
  double x_window = 40.0;
  std::size_t x_samples = 4096;
  double rel_tol = 1e-8;
};

struct WeylCount {
  double count_plus = 0.0;
  double count_minus = 0.0;
  bool converged = true;
};

/// (2 pi)^-1 meas{(x, xi): ±s(xi) weight2(x) > eps}. weight2 must be
/// non-negative and vanish at infinity, the symbol must decay at infinity.
WeylCount weyl_counting(const Symbol& symbol, const Symbol& weight2, double eps,
                        const WeylOptions& opts = {});

/// int_R |b(x)|^(2/alpha) dx by direct adaptive quadrature in x.
double weight_integral(double alpha);

/// C^± = (2 pi)^-alpha (A(-inf)_±^(1/alpha) + A(+inf)_±^(1/alpha))^alpha
///       (int |b|^(2/alpha))^alpha.
std::pair<double, double> weyl_coefficient(double a_plus_inf, double a_minus_inf, double alpha);

}  // namespace hankelspec
