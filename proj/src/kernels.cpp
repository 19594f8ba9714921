#include "hankelspec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hankelspec/errors.hpp"

namespace hankelspec {

using detail::require;
using nlohmann::json;

void AsymDiscrete::validate() const {
  require(std::isfinite(alpha) && alpha > 0, "alpha must be a positive finite number");
  require(std::isfinite(b1) && std::isfinite(bm1), "b1 and bm1 must be finite");
}

void AsymContinuous::validate() const {
  require(std::isfinite(alpha) && alpha > 0, "alpha must be a positive finite number");
  require(std::isfinite(b0) && std::isfinite(binf), "b0 and binf must be finite");
}

// ---------------------------------------------------------------------------
// DiscreteKernel

DiscreteKernel::DiscreteKernel(Fn fn, std::vector<std::pair<std::int64_t, double>> overrides,
                               std::optional<AsymDiscrete> params)
    : fn_(std::make_shared<const Fn>(std::move(fn))), params_(params) {
  require(static_cast<bool>(*fn_), "DiscreteKernel: empty evaluator");
  *this = with_overrides(std::move(overrides));
  description_.reset();
}

DiscreteKernel DiscreteKernel::with_overrides(
    std::vector<std::pair<std::int64_t, double>> overrides) const {
  DiscreteKernel out = *this;
  std::sort(overrides.begin(), overrides.end());
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    require(overrides[i].first >= 0, "override index must be non-negative");
    require(std::isfinite(overrides[i].second), "override value must be finite");
    require(i == 0 || overrides[i].first != overrides[i - 1].first, "duplicate override index");
  }
  out.overrides_ = std::move(overrides);
  if (out.description_) {
    json ov = json::array();
    for (const auto& [j, v] : out.overrides_) ov.push_back({j, v});
    (*out.description_)["overrides"] = ov;
  }
  return out;
}

DiscreteKernel DiscreteKernel::with_description(json desc) const {
  DiscreteKernel out = *this;
  out.description_ = std::move(desc);
  return out;
}

double DiscreteKernel::operator()(std::int64_t j) const {
  require(j >= 0, "DiscreteKernel: negative index");
  auto it = std::lower_bound(overrides_.begin(), overrides_.end(), j,
                             [](const auto& p, std::int64_t k) { return p.first < k; });
  if (it != overrides_.end() && it->first == j) return it->second;
  return (*fn_)(j);
}

std::vector<double> DiscreteKernel::samples(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = (*this)(static_cast<std::int64_t>(j));
  return out;
}

Eigen::MatrixXcd BlockKernel::operator()(std::int64_t j) const {
  Eigen::MatrixXcd m = eval(j);
  if (m.rows() != block_dim || m.cols() != block_dim) {
    std::ostringstream os;
    os << "BlockKernel: value at j=" << j << " is " << m.rows() << "x" << m.cols()
       << ", expected " << block_dim << "x" << block_dim;
    throw ValidationError(os.str());
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "BlockKernel: value is not Hermitian");
  return m;
}

// ---------------------------------------------------------------------------
// Cutoffs and model functions

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / x);
  const double g = std::exp(-1.0 / (1.0 - x));
  return f / (f + g);
}

CutoffPair smooth_cutoffs() {
  CutoffPair c;
  c.chi0 = [](double t) { return smooth_step((0.5 - t) * 4.0); };
  c.chiinf = [](double t) { return smooth_step((t - 2.0) * 0.5); };
  return c;
}

namespace {

double log_power(double t, double alpha) { return std::pow(std::abs(std::log(t)), -alpha); }

double model_value(std::int64_t j, const AsymDiscrete& p) {
  if (j < 2) return 0.0;
  const double coeff = (j % 2 == 0) ? p.b1 + p.bm1 : p.b1 - p.bm1;
  if (coeff == 0.0) return 0.0;
  const double x = static_cast<double>(j);
  return coeff / (x * std::pow(std::log(x), p.alpha));
}

}  // namespace

DiscreteKernel model_sequence(const AsymDiscrete& p) {
  p.validate();
  DiscreteKernel h([p](std::int64_t j) { return model_value(j, p); }, {}, p);
  return h.with_description(
      {{"type", "discrete_model"}, {"alpha", p.alpha}, {"b1", p.b1}, {"bm1", p.bm1}});
}

std::pair<ContinuousKernel, ContinuousKernel> model_kernels_h0_hinf(double alpha,
                                                                     const CutoffPair& c) {
  require(std::isfinite(alpha) && alpha > 0, "alpha must be positive");
  auto make = [alpha](std::function<double(double)> chi) {
    ContinuousKernel k;
    k.eval = [alpha, chi](double t) {
      require(t > 0, "kernel evaluated at t <= 0");
      const double w = chi(t);
      if (w == 0.0) return 0.0;
      return w * log_power(t, alpha) / t;
    };
    return k;
  };
  return {make(c.chi0), make(c.chiinf)};
}

ContinuousKernel model_kernel(const AsymContinuous& p, const CutoffPair& c) {
  p.validate();
  auto [h0, hinf] = model_kernels_h0_hinf(p.alpha, c);
  ContinuousKernel k;
  k.eval = [p, h0 = h0.eval, hinf = hinf.eval](double t) {
    return p.b0 * h0(t) + p.binf * hinf(t);
  };
  k.params = p;
  k.description = json{{"type", "continuous_model"}, {"alpha", p.alpha}, {"b0", p.b0},
                       {"binf", p.binf}};
  return k;
}

PiecewiseFn sigma_star(const AsymContinuous& p, const CutoffPair& c) {
  p.validate();
  PiecewiseFn s;
  s.fn = [p, c](double lambda) {
    require(lambda > 0, "sigma*: lambda must be positive");
    const double small = c.chi0(lambda);
    const double large = c.chiinf(lambda);
    if (small == 0.0 && large == 0.0) return 0.0;
    return (p.binf * small + p.b0 * large) * log_power(lambda, p.alpha);
  };
  s.breaks = {0.25, 0.5, 2.0, 4.0};
  return s;
}

double eta_argument(double mu) { return (1.0 + mu) / (2.0 * (1.0 - mu)); }

PiecewiseFn eta_star(const AsymDiscrete& p, const CutoffPair& c) {
  p.validate();
  PiecewiseFn e;
  e.fn = [p, c](double mu) {
    require(mu > -1.0 && mu < 1.0, "eta*: mu must lie in (-1, 1)");
    const double x = eta_argument(mu);
    const double large = c.chiinf(x);
    const double small = c.chi0(x);
    if (large == 0.0 && small == 0.0) return 0.0;
    return (p.b1 * large + p.bm1 * small) * log_power(x, p.alpha);
  };
  // x = 1/4, 1/2, 2, 4
  e.breaks = {-1.0 / 3.0, 0.0, 0.6, 7.0 / 9.0};
  return e;
}

// ---------------------------------------------------------------------------
// Moments

namespace {

// int_0^1 g(nu) nu^j dnu, g bounded with transition points `breaks`.
QuadResult half_moment(const std::function<double(double)>& g, std::vector<double> breaks,
                       std::int64_t j, const QuadOptions& opts) {
  std::erase_if(breaks, [](double b) { return b <= 0.0 || b >= 1.0; });
  std::sort(breaks.begin(), breaks.end());
  const double p = breaks.empty() ? 0.5 : std::max(0.5, breaks.back());
  const double jd = static_cast<double>(j);

  std::vector<double> pts{0.0};
  for (double b : breaks)
    if (b < p) pts.push_back(b);
  pts.push_back(p);
  auto direct = [&](double nu) {
    const double v = g(nu);
    return v == 0.0 ? 0.0 : v * std::pow(nu, jd);
  };
  QuadResult r = integrate(direct, pts, opts);

  // nu = 1 - exp(-v) on [p, 1)
  const double v0 = -std::log1p(-p);
  const double peak = std::max(v0, std::log(jd + 1.0));
  const double v1 = peak + 40.0;
  auto tail = [&](double v) {
    const double e = std::exp(-v);
    const double nu = 1.0 - e;
    if (nu >= 1.0) return 0.0;
    const double val = g(nu);
    if (val == 0.0) return 0.0;
    return val * std::exp(jd * std::log1p(-e)) * e;
  };
  std::vector<double> tpts{v0};
  if (peak > v0) tpts.push_back(peak);
  tpts.push_back(v1);
  r += integrate(tail, tpts, opts);
  return r;
}

}  // namespace

std::pair<QuadResult, QuadResult> moment_halves(const PiecewiseFn& eta, std::int64_t j,
                                                const QuadOptions& opts) {
  require(j >= 0, "moment index must be non-negative");
  std::vector<double> neg;
  for (double b : eta.breaks) neg.push_back(-b);
  auto f = eta.fn;
  QuadResult pos = half_moment(f, eta.breaks, j, opts);
  QuadResult negative = half_moment([f](double nu) { return f(-nu); }, neg, j, opts);
  return {pos, negative};
}

QuadResult moment(const PiecewiseFn& eta, std::int64_t j, const QuadOptions& opts) {
  auto [pos, neg] = moment_halves(eta, j, opts);
  if (j % 2 == 1) neg.value = -neg.value;
  pos += neg;
  return pos;
}

DiscreteKernel moments(const PiecewiseFn& eta, std::int64_t jmax) {
  require(jmax >= 0, "moments: jmax must be non-negative");
  auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(jmax) + 1);
  for (std::int64_t j = 0; j <= jmax; ++j) {
    const QuadResult r = moment(eta, j);
    if (!r.converged) {
      std::ostringstream os;
      os << "moments: index " << j;
      throw_if_unconverged(r, os.str().c_str());
    }
    (*table)[static_cast<std::size_t>(j)] = r.value;
  }
  return DiscreteKernel([table, eta](std::int64_t j) {
    if (j < static_cast<std::int64_t>(table->size())) return (*table)[static_cast<std::size_t>(j)];
    const QuadResult r = moment(eta, j);
    throw_if_unconverged(r, "moments");
    return r.value;
  });
}

BlockKernel tensor_block_kernel(const Eigen::MatrixXcd& m, const DiscreteKernel& scalar) {
  require(m.rows() == m.cols() && m.rows() >= 1 && m.rows() <= 8,
          "block dimension must be between 1 and 8");
  BlockKernel k;
  k.block_dim = static_cast<int>(m.rows());
  k.eval = [m, scalar](std::int64_t j) -> Eigen::MatrixXcd { return m * scalar(j); };
  return k;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::vector<std::pair<std::int64_t, double>> read_overrides(const json& j) {
  std::vector<std::pair<std::int64_t, double>> out;
  if (!j.contains("overrides")) return out;
  for (const auto& e : j.at("overrides")) {
    require(e.is_array() && e.size() == 2, "overrides must be [index, value] pairs");
    out.emplace_back(e[0].get<std::int64_t>(), e[1].get<double>());
  }
  return out;
}

double get_number(const json& j, const char* key) {
  require(j.contains(key) && j.at(key).is_number(), std::string("missing numeric field ") + key);
  return j.at(key).get<double>();
}

}  // namespace

DiscreteKernel discrete_kernel_from_json(const json& j) {
  require(j.is_object() && j.contains("type"), "kernel description needs a \"type\"");
  const std::string type = j.at("type").get<std::string>();
  std::optional<DiscreteKernel> h;
  if (type == "discrete_model") {
    AsymDiscrete p{get_number(j, "alpha"), get_number(j, "b1"), get_number(j, "bm1")};
    h = model_sequence(p);
  } else if (type == "power") {
    const double g = get_number(j, "gamma");
    require(std::isfinite(g) && g > 0, "power kernel needs gamma > 0");
    h = DiscreteKernel([g](std::int64_t k) { return std::pow(static_cast<double>(k) + 1.0, -g); })
            .with_description({{"type", "power"}, {"gamma", g}});
  } else if (type == "hilbert") {
    h = DiscreteKernel([](std::int64_t k) { return 1.0 / (static_cast<double>(k) + 1.0); })
            .with_description({{"type", "hilbert"}});
  } else if (type == "delta") {
    h = DiscreteKernel([](std::int64_t k) { return k == 0 ? 1.0 : 0.0; })
            .with_description({{"type", "delta"}});
  } else if (type == "sequence") {
    auto values = std::make_shared<std::vector<double>>(j.at("values").get<std::vector<double>>());
    for (double v : *values) require(std::isfinite(v), "sequence values must be finite");
    h = DiscreteKernel([values](std::int64_t k) {
          return k < static_cast<std::int64_t>(values->size()) ? (*values)[k] : 0.0;
        }).with_description({{"type", "sequence"}, {"values", *values}});
  } else if (type == "moments_eta_star") {
    AsymDiscrete p{get_number(j, "alpha"), get_number(j, "b1"), get_number(j, "bm1")};
    const auto jmax = j.value("jmax", std::int64_t{0});
    DiscreteKernel m = moments(eta_star(p, smooth_cutoffs()), jmax);
    h = DiscreteKernel([m](std::int64_t k) { return m(k); }, {}, p)
            .with_description({{"type", "moments_eta_star"},
                               {"alpha", p.alpha},
                               {"b1", p.b1},
                               {"bm1", p.bm1},
                               {"jmax", jmax}});
  } else {
    throw ValidationError("unknown discrete kernel type: " + type);
  }
  auto ov = read_overrides(j);
  return ov.empty() ? *h : h->with_overrides(std::move(ov));
}

ContinuousKernel continuous_kernel_from_json(const json& j) {
  require(j.is_object() && j.contains("type"), "kernel description needs a \"type\"");
  const std::string type = j.at("type").get<std::string>();
  if (type == "continuous_model") {
    AsymContinuous p{get_number(j, "alpha"), get_number(j, "b0"), get_number(j, "binf")};
    return model_kernel(p, smooth_cutoffs());
  }
  ContinuousKernel k;
  if (type == "exponential") {
    k.eval = [](double t) { return std::exp(-t); };
    k.deriv = [](int m, double t) { return (m % 2 == 0 ? 1.0 : -1.0) * std::exp(-t); };
  } else if (type == "carleman") {
    k.eval = [](double t) { return 1.0 / t; };
    k.deriv = [](int m, double t) {
      return (m % 2 == 0 ? 1.0 : -1.0) * std::tgamma(m + 1.0) * std::pow(t, -1.0 - m);
    };
  } else {
    throw ValidationError("unknown continuous kernel type: " + type);
  }
  k.description = json{{"type", type}};
  return k;
}

json to_json(const DiscreteKernel& h) {
  if (!h.description()) throw ValidationError("kernel was built from a closure; not serializable");
  return *h.description();
}

json to_json(const ContinuousKernel& h) {
  if (!h.description) throw ValidationError("kernel was built from a closure; not serializable");
  return *h.description;
}

}  // namespace hankelspec
