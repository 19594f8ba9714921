#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "hankelspec/kernels.hpp"

namespace hankelspec {

struct CoefficientReport {
  double alpha = 0.0;
  double v_alpha = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  nlohmann::json inputs;
};

void to_json(nlohmann::json& j, const CoefficientReport& r);

/// B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), evaluated in the log domain.
double beta_fn(double a, double b);

/// v(alpha) = 2^-alpha pi^(1 - 2 alpha) B(1/(2 alpha), 1/2)^alpha.
double v_alpha(double alpha);

/// x_+^(1/alpha) with 0^(1/alpha) = 0.
double positive_part_root(double x, double alpha);

/// c^± = v(alpha) ((b1)_±^(1/alpha) + (bm1)_±^(1/alpha))^alpha.
CoefficientReport c_pm_discrete(const AsymDiscrete& p);

/// Same formula with (b0, binf).
CoefficientReport c_pm_continuous(const AsymContinuous& p);

/// c^± = v(alpha) (Tr (b0)_±^(1/alpha) + Tr (binf)_±^(1/alpha))^alpha, with
/// the positive/negative parts taken by spectral calculus.
CoefficientReport c_pm_matrix(const Eigen::MatrixXcd& b0, const Eigen::MatrixXcd& binf,
                              double alpha);

/// floor(alpha) + 1 for alpha >= 1/2, else 0.
int m_alpha(double alpha);

/// Leading term pi sqrt(2 gamma n) of -log lambda_n^+ for h(j) = (j+1)^-gamma.
double widom_exponent(double gamma, long n);

}  // namespace hankelspec
