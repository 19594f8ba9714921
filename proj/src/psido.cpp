#include "hankelspec/psido.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <fftw3.h>

#include "hankelspec/errors.hpp"
#include "hankelspec/quadrature.hpp"

namespace hankelspec {

using detail::require;
using std::numbers::pi;

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

class PsdoFft {
 public:
  explicit PsdoFft(std::size_t m) : m_(m) {
    std::vector<std::complex<double>> a(m), b(m);
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    forward_ = fftw_plan_dft_1d(static_cast<int>(m), pa, pb, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(static_cast<int>(m), pa, pb, FFTW_BACKWARD, flags);
  }
  PsdoFft(const PsdoFft&) = delete;
  PsdoFft& operator=(const PsdoFft&) = delete;
  ~PsdoFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
  }
  std::size_t size() const { return m_; }

 private:
  std::size_t m_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

double weight_b(double x) { return std::sqrt(pi / std::cosh(pi * x)); }

Symbol symbol_from_sigma(const PiecewiseFn& sigma) {
  return [sigma](double xi) {
    const double lambda = std::exp(-xi);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      std::ostringstream os;
      os << "symbol_from_sigma: exp(-xi) out of range at xi = " << xi;
      throw ValidationError(os.str());
    }
    return sigma(lambda);
  };
}

Symbol symbol_from_eta(const PiecewiseFn& eta) {
  return [eta](double xi) {
    const double e = std::exp(-xi);
    double mu = (2.0 * e - 1.0) / (2.0 * e + 1.0);
    if (!std::isfinite(e)) mu = 1.0;
    if (mu <= -1.0 || mu >= 1.0) {
      std::ostringstream os;
      os << "symbol_from_eta: mu rounds to the endpoint at xi = " << xi;
      throw ValidationError(os.str());
    }
    return eta(mu);
  };
}

Symbol symbol_star(const AsymContinuous& p, const CutoffPair& c) {
  p.validate();
  return [p, c](double xi) {
    const double e = std::exp(-xi);
    const double small = c.chi0(e);
    const double large = c.chiinf(e);
    if (small == 0.0 && large == 0.0) return 0.0;
    return (p.binf * small + p.b0 * large) * std::pow(std::abs(xi), -p.alpha);
  };
}

Symbol symbol_eta_star(const AsymDiscrete& p, const CutoffPair& c) {
  p.validate();
  return [p, c](double xi) {
    const double e = std::exp(-xi);
    const double large = c.chiinf(e);
    const double small = c.chi0(e);
    if (small == 0.0 && large == 0.0) return 0.0;
    return (p.b1 * large + p.bm1 * small) * std::pow(std::abs(xi), -p.alpha);
  };
}

PsdoModel build_psdo(const Symbol& symbol, double x_half, std::size_t m) {
  require(std::isfinite(x_half) && x_half > 0, "build_psdo: x_half must be positive");
  require(m >= 2 && (m & (m - 1)) == 0, "build_psdo: M must be a power of two");
  PsdoModel model;
  model.x_half_ = x_half;
  model.x_.resize(m);
  model.b_.resize(m);
  model.xi_.resize(m);
  model.s_.resize(m);
  const double dx = 2.0 * x_half / static_cast<double>(m);
  const double dxi = pi / x_half;
  double smax = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    model.x_[i] = -x_half + dx * static_cast<double>(i);
    model.b_[i] = weight_b(model.x_[i]);
    const auto k = static_cast<double>(i < m / 2 ? static_cast<std::ptrdiff_t>(i)
                                                 : static_cast<std::ptrdiff_t>(i) -
                                                       static_cast<std::ptrdiff_t>(m));
    model.xi_[i] = k * dxi;
    const double s = symbol(model.xi_[i]);
    require(std::isfinite(s), "build_psdo: symbol is not finite on the frequency grid");
    model.s_[i] = s;
    smax = std::max(smax, std::abs(s));
  }
  model.aliasing_ = std::abs(model.s_[m / 2]) > 1e-6 * smax;
  model.fft_ = std::make_shared<const PsdoFft>(m);
  return model;
}

void PsdoModel::apply(std::span<const std::complex<double>> u,
                      std::span<std::complex<double>> out) const {
  const std::size_t m = x_.size();
  require(u.size() == m && out.size() == m, "PsdoModel::apply: dimension mismatch");
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = b_[i] * u[i];
  fft_->forward(a.data(), b.data());
  for (std::size_t i = 0; i < m; ++i) b[i] *= s_[i];
  fft_->backward(b.data(), a.data());
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = b_[i] * a[i] * scale;
}

Eigen::VectorXcd PsdoModel::apply(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd out(u.size());
  apply(std::span<const std::complex<double>>(u.data(), static_cast<std::size_t>(u.size())),
        std::span<std::complex<double>>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

ComplexLinearMap PsdoModel::linear_map() const {
  return [self = *this](std::span<const std::complex<double>> u,
                        std::span<std::complex<double>> out) { self.apply(u, out); };
}

// ---------------------------------------------------------------------------
// Weyl counting

namespace {

// meas{x in [-X, X] : w(x) > tau} from samples refined at every crossing.
class LevelSetMeasure {
 public:
  LevelSetMeasure(const Symbol& w, double x_window, std::size_t samples)
      : w_(w), x_(samples), v_(samples) {
    require(samples >= 16, "weyl_counting: need at least 16 x samples");
    for (std::size_t i = 0; i < samples; ++i) {
      x_[i] = -x_window + 2.0 * x_window * static_cast<double>(i) / static_cast<double>(samples - 1);
      v_[i] = w_(x_[i]);
      require(std::isfinite(v_[i]) && v_[i] >= 0, "weyl_counting: weight must be non-negative");
    }
    refine_peaks();
    max_ = *std::max_element(v_.begin(), v_.end());
  }

  double max() const { return max_; }

  double operator()(double tau) const {
    if (tau >= max_) return 0.0;
    double total = 0.0;
    double start = v_[0] > tau ? x_[0] : 0.0;
    bool inside = v_[0] > tau;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const bool next = v_[i + 1] > tau;
      if (next == inside) continue;
      const double root = crossing(x_[i], x_[i + 1], tau);
      if (next) {
        start = root;
      } else {
        total += root - start;
      }
      inside = next;
    }
    if (inside) total += x_.back() - start;
    return total;
  }

 private:
  // A peak falling between two samples would cut the top off every level set.
  void refine_peaks() {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      pts.emplace_back(x_[i], v_[i]);
      if (i == 0 || i + 1 == x_.size()) continue;
      if (!(v_[i] > 0 && v_[i] >= v_[i - 1] && v_[i] >= v_[i + 1])) continue;
      const auto [xm, fm] = boost::math::tools::brent_find_minima(
          [this](double x) { return -w_(x); }, x_[i - 1], x_[i + 1], 52);
      if (-fm > v_[i]) pts.emplace_back(xm, -fm);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              pts.end());
    x_.clear();
    v_.clear();
    for (const auto& [x, v] : pts) {
      x_.push_back(x);
      v_.push_back(v);
    }
  }

  double crossing(double a, double b, double tau) const {
    auto f = [&](double x) { return w_(x) - tau; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 100;
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, f(a), f(b), tol, iters);
    return 0.5 * (lo + hi);
  }

  Symbol w_;
  std::vector<double> x_, v_;
  double max_ = 0.0;
};

// Smallest dyadic R with |s| < threshold sampled on [R/2, R] and [-R, -R/2].
double symbol_support_radius(const Symbol& s, double threshold, bool& ok) {
  ok = true;
  for (double r = 2.0; r <= std::ldexp(1.0, 40); r *= 2.0) {
    bool quiet = true;
    for (int i = 0; i <= 256 && quiet; ++i) {
      const double xi = r * (0.5 + 0.5 * i / 256.0);
      if (std::abs(s(xi)) >= threshold || std::abs(s(-xi)) >= threshold) quiet = false;
    }
    if (quiet) return r;
  }
  ok = false;
  return std::ldexp(1.0, 40);
}

}  // namespace

WeylCount weyl_counting(const Symbol& symbol, const Symbol& weight2, double eps,
                        const WeylOptions& opts) {
  require(std::isfinite(eps) && eps > 0, "weyl_counting: eps must be positive");
  const LevelSetMeasure measure(weight2, opts.x_window, opts.x_samples);
  WeylCount out;
  if (measure.max() == 0.0) return out;
  bool ok = true;
  const double radius = symbol_support_radius(symbol, eps / measure.max(), ok);
  out.converged = ok;

  std::vector<double> pts;
  const int panels = 128;
  for (int i = 0; i <= panels; ++i) pts.push_back(-radius + 2.0 * radius * i / panels);
  QuadOptions qo;
  qo.rel_tol = opts.rel_tol;
  qo.max_panels = 40000;
  for (int sign : {+1, -1}) {
    auto integrand = [&](double xi) {
      const double s = sign * symbol(xi);
      if (s <= 0.0) return 0.0;
      return measure(eps / s);
    };
    const QuadResult r = integrate(integrand, pts, qo);
    out.converged = out.converged && r.converged;
    (sign > 0 ? out.count_plus : out.count_minus) = r.value / (2.0 * pi);
  }
  return out;
}

double weight_integral(double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "weight_integral: alpha must be positive");
  // (pi / cosh(pi x))^(1/alpha) <= (2 pi)^(1/alpha) exp(-pi x / alpha)
  const double cut = alpha / pi * (std::log(2.0 * pi) / alpha + 60.0);
  auto f = [alpha](double x) { return std::pow(pi / std::cosh(pi * x), 1.0 / alpha); };
  std::vector<double> pts;
  for (int i = 0; i <= 16; ++i) pts.push_back(cut * i / 16.0);
  QuadOptions qo;
  qo.rel_tol = 1e-14;
  const QuadResult r = integrate(f, pts, qo);
  throw_if_unconverged(r, "weight_integral");
  return 2.0 * r.value;
}

std::pair<double, double> weyl_coefficient(double a_plus_inf, double a_minus_inf, double alpha) {
  require(std::isfinite(alpha) && alpha > 0, "weyl_coefficient: alpha must be positive");
  require(std::isfinite(a_plus_inf) && std::isfinite(a_minus_inf),
          "weyl_coefficient: A(+inf), A(-inf) must be finite");
  auto root = [alpha](double x) { return x > 0 ? std::pow(x, 1.0 / alpha) : 0.0; };
  const double sp = root(a_minus_inf) + root(a_plus_inf);
  const double sm = root(-a_minus_inf) + root(-a_plus_inf);
  if (sp == 0.0 && sm == 0.0) return {0.0, 0.0};
  const double common = std::pow(weight_integral(alpha) / (2.0 * pi), alpha);
  return {sp > 0 ? common * std::pow(sp, alpha) : 0.0, sm > 0 ? common * std::pow(sm, alpha) : 0.0};
}

}  // namespace hankelspec
