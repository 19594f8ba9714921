#include "hankelspec/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "hankelspec/errors.hpp"

namespace hankelspec {
namespace {

// Kronrod abscissae on [0, 1] (symmetric), Gauss weights on the odd ones.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, resabs;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[i] * (f1 + f2);
    resabs += kWgk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) resg += kWg[i / 2] * (f1 + f2);
  }
  Panel p{a, b, resk * half, std::abs((resk - resg) * half), resabs * std::abs(half)};
  return p;
}

}  // namespace

QuadResult& QuadResult::operator+=(const QuadResult& other) {
  value += other.value;
  abs_error += other.abs_error;
  panels += other.panels;
  evaluations += other.evaluations;
  converged = converged && other.converged;
  return *this;
}

QuadResult integrate(const std::function<double(double)>& f, std::span<const double> points,
                     const QuadOptions& opts) {
  detail::require(points.size() >= 2, "integrate: need at least two points");
  std::priority_queue<Panel> queue;
  double total = 0.0, error = 0.0, total_abs = 0.0;
  int evals = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    detail::require(points[i] <= points[i + 1], "integrate: points must be non-decreasing");
    if (points[i] == points[i + 1]) continue;
    Panel p = gauss_kronrod(f, points[i], points[i + 1]);
    evals += 15;
    total += p.value;
    error += p.error;
    total_abs += p.resabs;
    queue.push(p);
  }
  QuadResult r;
  auto tolerance = [&] {
    return std::max({opts.abs_tol, opts.rel_tol * std::abs(total),
                     50.0 * std::numeric_limits<double>::epsilon() * total_abs});
  };
  while (!queue.empty() && error > tolerance()) {
    if (static_cast<int>(queue.size()) >= opts.max_panels) {
      r.converged = false;
      break;
    }
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // panel cannot be split further
      r.converged = false;
      break;
    }
    Panel left = gauss_kronrod(f, worst.a, mid);
    Panel right = gauss_kronrod(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    total_abs += left.resabs + right.resabs - worst.resabs;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum from the panels to shed the drift of the running updates.
  double value = 0.0, err = 0.0;
  const int panels = static_cast<int>(queue.size());
  while (!queue.empty()) {
    value += queue.top().value;
    err += queue.top().error;
    queue.pop();
  }
  r.value = value;
  r.abs_error = err;
  r.panels = panels;
  r.evaluations = evals;
  if (!std::isfinite(value)) r.converged = false;
  return r;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts) {
  const std::array<double, 2> pts{a, b};
  return integrate(f, pts, opts);
}

void throw_if_unconverged(const QuadResult& r, const char* what) {
  if (r.converged) return;
  std::ostringstream os;
  os << what << ": quadrature did not converge (value " << r.value << ", error estimate "
     << r.abs_error << ", " << r.panels << " panels, " << r.evaluations << " evaluations)";
  throw ConvergenceError(os.str());
}

}  // namespace hankelspec
