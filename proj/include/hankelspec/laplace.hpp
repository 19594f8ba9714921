#pragma once

#include <vector>

#include <json.hpp>

#include "hankelspec/kernels.hpp"

namespace hankelspec {

/// (L sigma)(t) = int_0^inf exp(-lambda t) sigma(lambda) dlambda for bounded
/// sigma. (0, a] is mapped by lambda = exp(-u), [b, inf) by lambda = exp(u)
/// and cut where exp(-lambda t) < 1e-18; a and b are the extreme breaks.
QuadResult laplace_transform(const PiecewiseFn& sigma, double t, const QuadOptions& opts = {});

/// Laplace transform tabulated on a uniform grid in u = log t and
/// interpolated by a cubic B-spline in u of t h(t). Intended for operators
/// that need h at many scattered points (discretize_integral).
ContinuousKernel tabulated_laplace_kernel(const PiecewiseFn& sigma, double u_min, double u_max,
                                          double du = 1.0 / 256);

struct RatioRow {
  double t = 0.0;
  double value = 0.0;
  double model = 0.0;
  double ratio = 0.0;
  double deviation = 0.0;  // |ratio - 1|
  double bound = 0.0;      // 3 / |log t|
};

struct RatioTable {
  double alpha = 0.0;
  int m = 0;
  double c = 0.0;
  std::vector<RatioRow> rows;

  /// Deviations strictly decrease along the rows.
  bool monotone() const;
  bool within_bounds() const;
};

/// I_m(t) = int_0^c (-log lambda)^-alpha lambda^m exp(-lambda t) dlambda,
/// 0 < c < 1, compared with m! t^(-1-m) |log t|^-alpha as t -> inf.
RatioTable lemma_L_check(double alpha, int m, double c, const std::vector<double>& t_list);

/// I_m(t) = int_c^inf (log lambda)^-alpha lambda^m exp(-lambda t) dlambda,
/// c > 1, compared with the same model as t -> 0.
RatioTable lemma_M_check(double alpha, int m, double c, const std::vector<double>& t_list);

struct ResidualRow {
  double x = 0.0;  // t or j
  double value = 0.0;
  double residual = 0.0;
  double normalized = 0.0;
  /// Second component for the discrete parity split.
  double residual_odd = 0.0;
  double normalized_odd = 0.0;
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
  double max_normalized() const;
};

/// g(t) = (L sigma*)(t) - b0 h0(t) - binf hinf(t) and |g(t)| t <log t>^(alpha+1).
ResidualTable model_kernel_residual(const AsymContinuous& p, const CutoffPair& c,
                                    const std::vector<double>& t_list);

/// Parity split of the moments of eta*: h*(j) = P(j) + (-1)^j Q(j) with
/// P, Q the integrals over [0, 1) and (-1, 0]. Reports
/// |P(j) - b1 m(j)| j (log j)^(alpha+1) and the same for Q against bm1.
ResidualTable moment_residual(const AsymDiscrete& p, const CutoffPair& c,
                              const std::vector<long>& j_list);

nlohmann::json to_json(const RatioTable& t);
nlohmann::json to_json(const ResidualTable& t);

}  // namespace hankelspec
