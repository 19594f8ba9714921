#include "hankelspec/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "hankelspec/errors.hpp"

namespace hankelspec {

using detail::require;

void to_json(nlohmann::json& j, const CoefficientReport& r) {
  j = {{"alpha", r.alpha},
       {"v_alpha", r.v_alpha},
       {"c_plus", r.c_plus},
       {"c_minus", r.c_minus},
       {"inputs", r.inputs}};
}

double beta_fn(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0 && b > 0,
          "beta_fn: arguments must be positive");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double v_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "v_alpha: alpha must be positive");
  const double log_v = -alpha * std::numbers::ln2 + (1.0 - 2.0 * alpha) * std::log(std::numbers::pi) +
                       alpha * std::log(beta_fn(1.0 / (2.0 * alpha), 0.5));
  return std::exp(log_v);
}

double positive_part_root(double x, double alpha) {
  return x > 0.0 ? std::pow(x, 1.0 / alpha) : 0.0;
}

namespace {

CoefficientReport combine(double x, double y, double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "alpha must be positive");
  require(std::isfinite(x) && std::isfinite(y), "coefficients must be finite");
  CoefficientReport r;
  r.alpha = alpha;
  r.v_alpha = v_alpha(alpha);
  const double sp = positive_part_root(x, alpha) + positive_part_root(y, alpha);
  const double sm = positive_part_root(-x, alpha) + positive_part_root(-y, alpha);
  r.c_plus = sp > 0 ? r.v_alpha * std::pow(sp, alpha) : 0.0;
  r.c_minus = sm > 0 ? r.v_alpha * std::pow(sm, alpha) : 0.0;
  return r;
}

double trace_part_root(const Eigen::MatrixXcd& m, double alpha, double sign) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += positive_part_root(sign * es.eigenvalues()[i], alpha);
  return s;
}

}  // namespace

CoefficientReport c_pm_discrete(const AsymDiscrete& p) {
  p.validate();
  CoefficientReport r = combine(p.b1, p.bm1, p.alpha);
  r.inputs = {{"alpha", p.alpha}, {"b1", p.b1}, {"bm1", p.bm1}};
  return r;
}

CoefficientReport c_pm_continuous(const AsymContinuous& p) {
  p.validate();
  CoefficientReport r = combine(p.b0, p.binf, p.alpha);
  r.inputs = {{"alpha", p.alpha}, {"b0", p.b0}, {"binf", p.binf}};
  return r;
}

CoefficientReport c_pm_matrix(const Eigen::MatrixXcd& b0, const Eigen::MatrixXcd& binf,
                              double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "alpha must be positive");
  require(b0.rows() == b0.cols() && binf.rows() == binf.cols() && b0.rows() == binf.rows() &&
              b0.rows() > 0,
          "c_pm_matrix: matrices must be square of equal dimension");
  for (const auto* m : {&b0, &binf}) {
    const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    require((*m - m->adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "c_pm_matrix: input is not Hermitian");
  }
  CoefficientReport r;
  r.alpha = alpha;
  r.v_alpha = v_alpha(alpha);
  const double sp = trace_part_root(b0, alpha, 1.0) + trace_part_root(binf, alpha, 1.0);
  const double sm = trace_part_root(b0, alpha, -1.0) + trace_part_root(binf, alpha, -1.0);
  r.c_plus = sp > 0 ? r.v_alpha * std::pow(sp, alpha) : 0.0;
  r.c_minus = sm > 0 ? r.v_alpha * std::pow(sm, alpha) : 0.0;
  auto dump = [](const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      rows.push_back(row);
    }
    return rows;
  };
  r.inputs = {{"alpha", alpha}, {"b0", dump(b0)}, {"binf", dump(binf)}};
  return r;
}

int m_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "m_alpha: alpha must be positive");
  return alpha >= 0.5 ? static_cast<int>(std::floor(alpha)) + 1 : 0;
}

double widom_exponent(double gamma, long n) {
  require(std::isfinite(gamma) && gamma > 1.0, "widom_exponent: gamma must exceed 1");
  require(n >= 1, "widom_exponent: n must be at least 1");
  return std::numbers::pi * std::sqrt(2.0 * gamma * static_cast<double>(n));
}

}  // namespace hankelspec
