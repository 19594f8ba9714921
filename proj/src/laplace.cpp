#include "hankelspec/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "hankelspec/errors.hpp"

namespace hankelspec {

using detail::require;
using nlohmann::json;

namespace {

// exp(-x) < 1e-18 past this point.
constexpr double kCut = 41.5;

void add_if_inside(std::vector<double>& pts, double x) {
  if (x > pts.front() && x < pts.back()) pts.push_back(x);
}

std::vector<double> finish(std::vector<double> pts, int subdivide) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (int k = 0; k < subdivide; ++k)
      out.push_back(pts[i] + (pts[i + 1] - pts[i]) * k / subdivide);
  out.push_back(pts.back());
  return out;
}

}  // namespace

QuadResult laplace_transform(const PiecewiseFn& sigma, double t, const QuadOptions& opts) {
  require(std::isfinite(t) && t > 0, "laplace_transform: t must be positive");
  std::vector<double> br = sigma.breaks;
  br.erase(std::remove_if(br.begin(), br.end(), [](double b) { return !(b > 0) || !std::isfinite(b); }),
           br.end());
  std::sort(br.begin(), br.end());
  const double a = br.empty() ? 1.0 : br.front();
  const double b = br.empty() ? 1.0 : br.back();
  const double lam_max = kCut / t;
  QuadResult total;

  // (0, a] with lambda = exp(-u): the integrand decays like exp(-u) past u = log t.
  {
    const double u0 = -std::log(a);
    const double u1 = std::max(u0, std::log(t)) + 45.0;
    std::vector<double> pts{std::max(u0, -std::log(lam_max)), u1};
    if (pts.front() < u1) {
      add_if_inside(pts, std::log(t));
      add_if_inside(pts, std::log(t) + 5.0);
      auto f = [&](double u) {
        const double lam = std::exp(-u);
        return sigma(lam) * std::exp(-lam * t) * lam;
      };
      total += integrate(f, finish(pts, 4), opts);
    }
  }
  // [a, b] directly in lambda.
  if (b > a && a < lam_max) {
    std::vector<double> pts{a, std::min(b, lam_max)};
    for (double x : br) add_if_inside(pts, x);
    auto f = [&](double lam) { return sigma(lam) * std::exp(-lam * t); };
    total += integrate(f, finish(pts, 2), opts);
  }
  // [b, inf) with lambda = exp(u), cut at lambda t = kCut.
  if (b < lam_max) {
    std::vector<double> pts{std::log(b), std::log(lam_max)};
    add_if_inside(pts, -std::log(t));
    add_if_inside(pts, std::log(lam_max) - 2.0);
    auto f = [&](double u) {
      const double lam = std::exp(u);
      return sigma(lam) * std::exp(-lam * t) * lam;
    };
    total += integrate(f, finish(pts, 4), opts);
  }
  return total;
}

ContinuousKernel tabulated_laplace_kernel(const PiecewiseFn& sigma, double u_min, double u_max,
                                          double du) {
  require(std::isfinite(u_min) && std::isfinite(u_max) && u_max > u_min,
          "tabulated_laplace_kernel: need u_min < u_max");
  require(du > 0 && (u_max - u_min) / du < 1e7, "tabulated_laplace_kernel: bad step");
  const auto n = static_cast<std::size_t>(std::ceil((u_max - u_min) / du)) + 1;
  std::vector<double> g(n);
  QuadOptions qo;
  qo.rel_tol = 1e-13;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::exp(u_min + du * static_cast<double>(i));
    const QuadResult r = laplace_transform(sigma, t, qo);
    if (!r.converged) {
      std::ostringstream os;
      os << "tabulated_laplace_kernel: quadrature failed at t = " << t;
      throw_if_unconverged(r, os.str().c_str());
    }
    g[i] = t * r.value;
  }
  const double u_last = u_min + du * static_cast<double>(n - 1);
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      g.begin(), g.end(), u_min, du);
  ContinuousKernel k;
  k.eval = [spline, sigma, u_min, u_last](double t) {
    const double u = std::log(t);
    if (u < u_min || u > u_last) {
      QuadOptions qo;
      qo.rel_tol = 1e-13;
      return laplace_transform(sigma, t, qo).value;
    }
    return (*spline)(u) / t;
  };
  return k;
}

// ---------------------------------------------------------------------------

bool RatioTable::monotone() const {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1].deviation < rows[i].deviation)) return false;
  return true;
}

bool RatioTable::within_bounds() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const RatioRow& r) { return r.deviation <= r.bound; });
}

namespace {

RatioRow ratio_row(double t, double value, double alpha, int m) {
  RatioRow r;
  r.t = t;
  r.value = value;
  const double lt = std::abs(std::log(t));
  r.model = std::exp(std::lgamma(m + 1.0) - (1.0 + m) * std::log(t) - alpha * std::log(lt));
  r.ratio = value / r.model;
  r.deviation = std::abs(r.ratio - 1.0);
  r.bound = 3.0 / lt;
  return r;
}

QuadOptions tight() {
  QuadOptions qo;
  qo.rel_tol = 1e-12;
  qo.max_panels = 20000;
  return qo;
}

}  // namespace

RatioTable lemma_L_check(double alpha, int m, double c, const std::vector<double>& t_list) {
  require(std::isfinite(alpha) && alpha > 0, "lemma_L_check: alpha must be positive");
  require(m >= 0, "lemma_L_check: m must be non-negative");
  require(c > 0 && c < 1, "lemma_L_check: c must lie in (0, 1)");
  require(!t_list.empty(), "lemma_L_check: empty t list");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    require(t_list[i] >= 10, "lemma_L_check: t values must be at least 10");
    require(i == 0 || t_list[i] > t_list[i - 1], "lemma_L_check: t list must increase");
  }
  RatioTable table{alpha, m, c, {}};
  for (double t : t_list) {
    // lambda = exp(-u), u in [-log c, inf)
    const double u0 = -std::log(c);
    const double lt = std::log(t);
    const double u1 = std::max(u0, lt) + 60.0 / (m + 1.0) + 5.0;
    std::vector<double> pts{u0, u1};
    add_if_inside(pts, lt - 4.0);
    add_if_inside(pts, lt);
    add_if_inside(pts, lt + 3.0);
    auto f = [&](double u) {
      const double lam = std::exp(-u);
      return std::pow(u, -alpha) * std::exp(-(m + 1.0) * u - lam * t);
    };
    const QuadResult r = integrate(f, finish(pts, 4), tight());
    throw_if_unconverged(r, "lemma_L_check");
    table.rows.push_back(ratio_row(t, r.value, alpha, m));
  }
  return table;
}

RatioTable lemma_M_check(double alpha, int m, double c, const std::vector<double>& t_list) {
  require(std::isfinite(alpha) && alpha > 0, "lemma_M_check: alpha must be positive");
  require(m >= 0, "lemma_M_check: m must be non-negative");
  require(c > 1 && std::isfinite(c), "lemma_M_check: c must exceed 1");
  require(!t_list.empty(), "lemma_M_check: empty t list");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    require(t_list[i] > 0 && t_list[i] <= 0.1, "lemma_M_check: t values must lie in (0, 0.1]");
    require(i == 0 || t_list[i] < t_list[i - 1], "lemma_M_check: t list must decrease");
  }
  RatioTable table{alpha, m, c, {}};
  for (double t : t_list) {
    // lambda = exp(u), u in [log c, log(lambda_max)]
    const double u0 = std::log(c);
    const double mt = -std::log(t);
    const double u1 = std::max(u0 + 1.0, mt + std::log(kCut + 40.0 + 2.0 * m));
    std::vector<double> pts{u0, u1};
    add_if_inside(pts, mt - 4.0);
    add_if_inside(pts, mt);
    add_if_inside(pts, mt + 2.0);
    auto f = [&](double u) {
      const double lam = std::exp(u);
      return std::pow(u, -alpha) * std::exp((m + 1.0) * u - lam * t);
    };
    const QuadResult r = integrate(f, finish(pts, 4), tight());
    throw_if_unconverged(r, "lemma_M_check");
    table.rows.push_back(ratio_row(t, r.value, alpha, m));
  }
  return table;
}

double ResidualTable::max_normalized() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max({m, r.normalized, r.normalized_odd});
  return m;
}

ResidualTable model_kernel_residual(const AsymContinuous& p, const CutoffPair& c,
                                    const std::vector<double>& t_list) {
  p.validate();
  const PiecewiseFn sigma = sigma_star(p, c);
  const auto [h0, hinf] = model_kernels_h0_hinf(p.alpha, c);
  ResidualTable table;
  for (double t : t_list) {
    require(std::isfinite(t) && t > 0, "model_kernel_residual: t must be positive");
    const QuadResult r = laplace_transform(sigma, t, tight());
    throw_if_unconverged(r, "model_kernel_residual");
    ResidualRow row;
    row.x = t;
    row.value = r.value;
    row.residual = r.value - p.b0 * h0(t) - p.binf * hinf(t);
    const double lt = std::log(t);
    row.normalized = std::abs(row.residual) * t * std::pow(1.0 + lt * lt, 0.5 * (p.alpha + 1.0));
    table.rows.push_back(row);
  }
  return table;
}

ResidualTable moment_residual(const AsymDiscrete& p, const CutoffPair& c,
                              const std::vector<long>& j_list) {
  p.validate();
  const PiecewiseFn eta = eta_star(p, c);
  ResidualTable table;
  for (long j : j_list) {
    require(j >= 16, "moment_residual: j must be at least 16");
    const auto [pos, neg] = moment_halves(eta, j, tight());
    throw_if_unconverged(pos, "moment_residual");
    throw_if_unconverged(neg, "moment_residual");
    const double x = static_cast<double>(j);
    const double lj = std::log(x);
    const double model = 1.0 / (x * std::pow(lj, p.alpha));
    const double norm = x * std::pow(lj, p.alpha + 1.0);
    ResidualRow row;
    row.x = x;
    row.value = pos.value + (j % 2 == 0 ? 1.0 : -1.0) * neg.value;
    row.residual = pos.value - p.b1 * model;
    row.normalized = std::abs(row.residual) * norm;
    row.residual_odd = neg.value - p.bm1 * model;
    row.normalized_odd = std::abs(row.residual_odd) * norm;
    table.rows.push_back(row);
  }
  return table;
}

json to_json(const RatioTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"t", r.t},
                    {"value", r.value},
                    {"model", r.model},
                    {"ratio", r.ratio},
                    {"deviation", r.deviation},
                    {"bound", r.bound}});
  return {{"alpha", t.alpha},
          {"m", t.m},
          {"c", t.c},
          {"rows", rows},
          {"monotone", t.monotone()},
          {"within_bounds", t.within_bounds()}};
}

json to_json(const ResidualTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"x", r.x},
                    {"value", r.value},
                    {"residual", r.residual},
                    {"normalized", r.normalized},
                    {"residual_odd", r.residual_odd},
                    {"normalized_odd", r.normalized_odd}});
  return {{"rows", rows}, {"max_normalized", t.max_normalized()}};
}

}  // namespace hankelspec
