#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hankelspec/quadrature.hpp"

namespace hankelspec {

/// Parameters of a sequence h(j) ~ (b1 + (-1)^j bm1) j^-1 (log j)^-alpha.
struct AsymDiscrete {
  double alpha = 1.0;
  double b1 = 0.0;
  double bm1 = 0.0;

  void validate() const;
};

/// Parameters of a kernel with h(t) ~ b0 t^-1 |log t|^-alpha as t -> 0 and
/// binf t^-1 |log t|^-alpha as t -> infinity.
struct AsymContinuous {
  double alpha = 1.0;
  double b0 = 0.0;
  double binf = 0.0;

  void validate() const;
};

/// A real function of one variable together with the points where it
/// changes character (plateau edges, transition regions). Quadrature
/// routines split there.
struct PiecewiseFn {
  std::function<double(double)> fn;
  std::vector<double> breaks;

  double operator()(double x) const { return fn(x); }
};

/// Real sequence h: Z_+ -> R. Finitely many leading values may be
/// overridden. Kernels built from a serializable description remember it.
class DiscreteKernel {
 public:
  using Fn = std::function<double(std::int64_t)>;

  explicit DiscreteKernel(Fn fn, std::vector<std::pair<std::int64_t, double>> overrides = {},
                          std::optional<AsymDiscrete> params = std::nullopt);

  double operator()(std::int64_t j) const;
  /// h(0), ..., h(count - 1).
  std::vector<double> samples(std::size_t count) const;

  const std::optional<AsymDiscrete>& params() const { return params_; }
  const std::vector<std::pair<std::int64_t, double>>& overrides() const { return overrides_; }

  const std::optional<nlohmann::json>& description() const { return description_; }
  DiscreteKernel with_description(nlohmann::json desc) const;
  DiscreteKernel with_overrides(std::vector<std::pair<std::int64_t, double>> overrides) const;

 private:
  std::shared_ptr<const Fn> fn_;
  std::vector<std::pair<std::int64_t, double>> overrides_;  // sorted by index
  std::optional<AsymDiscrete> params_;
  std::optional<nlohmann::json> description_;
};

/// Kernel h: (0, inf) -> R of an integral Hankel operator.
struct ContinuousKernel {
  std::function<double(double)> eval;
  /// Optional m-th derivative, (m, t) -> h^(m)(t).
  std::function<double(int, double)> deriv;
  std::optional<AsymContinuous> params;
  std::optional<nlohmann::json> description;

  double operator()(double t) const { return eval(t); }
};

/// Hermitian-matrix-valued sequence with fixed block dimension (at most 8).
struct BlockKernel {
  std::function<Eigen::MatrixXcd(std::int64_t)> eval;
  int block_dim = 1;

  Eigen::MatrixXcd operator()(std::int64_t j) const;
};

/// chi0 = 1 on (0, 1/4], 0 on [1/2, inf); chiinf = 0 on (0, 2], 1 on [4, inf).
struct CutoffPair {
  std::function<double(double)> chi0;
  std::function<double(double)> chiinf;
};

/// s(x) = f(x) / (f(x) + f(1 - x)) with f(x) = exp(-1/x) for x > 0, else 0.
double smooth_step(double x);

/// Canonical C-infinity cutoffs: affine rescalings of smooth_step onto the
/// transition intervals [1/4, 1/2] and [2, 4].
CutoffPair smooth_cutoffs();

/// h(j) = (b1 + (-1)^j bm1) j^-1 (log j)^-alpha for j >= 2, h(0) = h(1) = 0.
DiscreteKernel model_sequence(const AsymDiscrete& p);

/// Model kernels h0(t) = t^-1 |log t|^-alpha chi0(t) and
/// hinf(t) = t^-1 |log t|^-alpha chiinf(t).
std::pair<ContinuousKernel, ContinuousKernel> model_kernels_h0_hinf(double alpha,
                                                                     const CutoffPair& c);

/// b0 h0 + binf hinf.
ContinuousKernel model_kernel(const AsymContinuous& p, const CutoffPair& c);

/// sigma*(lambda) = binf |log lambda|^-alpha chi0(lambda) + b0 |log lambda|^-alpha chiinf(lambda).
/// Note binf multiplies the lambda -> 0 part: small lambda governs large t.
PiecewiseFn sigma_star(const AsymContinuous& p, const CutoffPair& c);

/// Argument x(mu) = (1 + mu) / (2 (1 - mu)) of the cutoffs inside eta*.
double eta_argument(double mu);

/// eta*(mu) = |log x|^-alpha (b1 chiinf(x) + bm1 chi0(x)), x = eta_argument(mu).
PiecewiseFn eta_star(const AsymDiscrete& p, const CutoffPair& c);

/// Moments h(j) = int_{-1}^{1} eta(mu) mu^j dmu; the ±1 endpoints are mapped
/// to exponential tails so logarithmic decay of eta costs nothing.
QuadResult moment(const PiecewiseFn& eta, std::int64_t j, const QuadOptions& opts = {});

/// The two halves of a moment: int_0^1 eta mu^j and int_{-1}^0 eta |mu|^j, so
/// that h(j) = positive + (-1)^j negative.
std::pair<QuadResult, QuadResult> moment_halves(const PiecewiseFn& eta, std::int64_t j,
                                                const QuadOptions& opts = {});

/// Table of moments for 0 <= j <= jmax; indices past jmax are integrated on
/// demand. Throws ConvergenceError when a table entry fails to converge.
DiscreteKernel moments(const PiecewiseFn& eta, std::int64_t jmax);

/// Hermitian-matrix-valued kernel h(j) = M m(j).
BlockKernel tensor_block_kernel(const Eigen::MatrixXcd& m, const DiscreteKernel& scalar);

/// JSON descriptions:
///   {"type":"discrete_model","alpha":a,"b1":x,"bm1":y,"overrides":[[j,v],...]}
///   {"type":"power","gamma":g}            h(j) = (j+1)^-g
///   {"type":"hilbert"}                    h(j) = 1/(j+1)
///   {"type":"delta"}                      h(j) = [j == 0]
///   {"type":"sequence","values":[...]}    explicit values, zero past the end
///   {"type":"moments_eta_star","alpha":a,"b1":x,"bm1":y,"jmax":n}
///   {"type":"continuous_model","alpha":a,"b0":x,"binf":y}   b0 h0 + binf hinf
///   {"type":"exponential"}                h(t) = exp(-t)
///   {"type":"carleman"}                   h(t) = 1/t
/// Every discrete form accepts "overrides".
DiscreteKernel discrete_kernel_from_json(const nlohmann::json& j);
ContinuousKernel continuous_kernel_from_json(const nlohmann::json& j);
/// Throws ValidationError for kernels built from closures.
nlohmann::json to_json(const DiscreteKernel& h);
nlohmann::json to_json(const ContinuousKernel& h);

}  // namespace hankelspec
