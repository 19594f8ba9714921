#include "hankelspec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "hankelspec/errors.hpp"
#include "hankelspec/hankel.hpp"

namespace hankelspec {

using detail::require;
using nlohmann::json;

std::optional<double> FitResult::rel_dev_plus() const {
  if (!predicted_plus || *predicted_plus == 0.0) return std::nullopt;
  return std::abs(plus.c_hat - *predicted_plus) / *predicted_plus;
}

std::optional<double> FitResult::rel_dev_minus() const {
  if (!predicted_minus || *predicted_minus == 0.0) return std::nullopt;
  return std::abs(minus.c_hat - *predicted_minus) / *predicted_minus;
}

BranchFit fit_branch(const std::vector<double>& lambdas, double alpha, const FitWindow& window) {
  require(std::isfinite(alpha) && alpha > 0, "fit: alpha must be positive");
  require(window.first >= 2, "fit: window must start at n >= 2 (1/log n is singular at 1)");
  require(window.size() >= 16, "fit: window needs at least 16 indices");
  BranchFit out;
  out.available = lambdas.size();
  if (lambdas.size() < window.last) {
    std::ostringstream os;
    os << "window [" << window.first << ", " << window.last << "] exceeds the " << lambdas.size()
       << " resolved eigenvalues";
    out.note = os.str();
    return out;
  }
  const std::size_t k = window.size();
  std::vector<double> y(k), z(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double n = static_cast<double>(window.first + i);
    y[i] = lambdas[window.first + i - 1] * std::pow(n, alpha);
    z[i] = 1.0 / std::log(n);
  }
  double zm = 0, ym = 0;
  for (std::size_t i = 0; i < k; ++i) {
    zm += z[i];
    ym += y[i];
  }
  zm /= static_cast<double>(k);
  ym /= static_cast<double>(k);
  double szz = 0, szy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    szz += (z[i] - zm) * (z[i] - zm);
    szy += (z[i] - zm) * (y[i] - ym);
  }
  if (!(szz > 1e-14 * zm * zm * static_cast<double>(k)))
    throw ValidationError("fit: regressor 1/log n is degenerate over the window");
  out.slope = szy / szz;
  out.c_hat = ym - out.slope * zm;
  double ss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - out.c_hat - out.slope * z[i];
    ss += r * r;
  }
  out.rms_residual = std::sqrt(ss / static_cast<double>(k));
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  out.median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  out.resolved = true;
  return out;
}

namespace {

// A complete branch with fewer eigenvalues than window.first has nothing
// above the floor in the window: its coefficient is zero to resolution.
BranchFit fit_side(const std::vector<double>& lambdas, bool complete, double floor, double alpha,
                   const FitWindow& window) {
  if (complete && lambdas.size() < window.first) {
    require(window.size() >= 16, "fit: window needs at least 16 indices");
    BranchFit out;
    out.available = lambdas.size();
    out.resolved = true;
    std::ostringstream os;
    os << "branch exhausted: all eigenvalues in the window lie below the floor " << floor
       << "; c_hat <= " << floor * std::pow(static_cast<double>(window.last), alpha);
    out.note = os.str();
    return out;
  }
  return fit_branch(lambdas, alpha, window);
}

FitResult fit_both(const SpectrumResult& s, double alpha, const FitWindow& window) {
  FitResult f;
  f.alpha = alpha;
  f.window = window;
  f.dim = s.dim;
  f.plus = fit_side(s.lambda_plus, s.complete_plus, s.floor(), alpha, window);
  f.minus = fit_side(s.lambda_minus, s.complete_minus, s.floor(), alpha, window);
  return f;
}

}  // namespace

FitResult fit_coefficient(const SpectrumResult& s, double alpha, const FitWindow& window) {
  FitResult f = fit_both(s, alpha, window);
  if (!f.plus.resolved && !f.minus.resolved)
    throw ResolutionError("fit_coefficient: window unresolved on both branches (" + f.plus.note +
                          ")");
  return f;
}

void attach_prediction(FitResult& fit, const CoefficientReport& predicted) {
  fit.predicted_plus = predicted.c_plus;
  fit.predicted_minus = predicted.c_minus;
}

// ---------------------------------------------------------------------------

EquivalenceTable psido_equivalence(const SpectrumResult& h_side, const SpectrumResult& psi_side,
                                   std::size_t k) {
  require(k >= 1, "psido_equivalence: k must be positive");
  auto depth = [k](const std::vector<double>& a, const std::vector<double>& b, const char* sign) {
    const std::size_t da = std::min(k, a.size());
    const std::size_t db = std::min(k, b.size());
    if (da != db) {
      std::ostringstream os;
      os << "psido_equivalence: depth mismatch on the " << sign << " branch (" << da << " vs "
         << db << " of " << k << ")";
      throw ResolutionError(os.str());
    }
    return da;
  };
  EquivalenceTable t;
  t.depth_plus = depth(h_side.lambda_plus, psi_side.lambda_plus, "+");
  t.depth_minus = depth(h_side.lambda_minus, psi_side.lambda_minus, "-");
  auto rel = [](double a, double b) {
    const double d = std::max(std::abs(a), std::abs(b));
    return d > 0 ? std::abs(a - b) / d : 0.0;
  };
  for (std::size_t n = 0; n < std::max(t.depth_plus, t.depth_minus); ++n) {
    EquivalenceRow row;
    row.n = n + 1;
    if (n < t.depth_plus) {
      row.rel_diff_plus = rel(h_side.lambda_plus[n], psi_side.lambda_plus[n]);
      t.max_rel_diff = std::max(t.max_rel_diff, *row.rel_diff_plus);
    }
    if (n < t.depth_minus) {
      row.rel_diff_minus = rel(h_side.lambda_minus[n], psi_side.lambda_minus[n]);
      t.max_rel_diff = std::max(t.max_rel_diff, *row.rel_diff_minus);
    }
    t.rows.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------------------

SpectrumResult truncated_spectrum(const DiscreteKernel& h, std::size_t n, const StudyOptions& opts) {
  require(n >= 1, "truncated_spectrum: N must be positive");
  if (n <= opts.dense_limit) return dense_eigs(build_truncated(h, n));
  const HankelOperator op = build_matrix_free(h, n);
  LanczosOptions lo;
  lo.k = opts.lanczos_k;
  return lanczos_extreme(as_linear_map(op), n, lo);
}

bool OrthogonalityTable::decreasing() const {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1].defect < rows[i].defect)) return false;
  return true;
}

OrthogonalityTable orthogonality_check(const AsymDiscrete& p, const std::vector<double>& eps_list,
                                       std::size_t n, const StudyOptions& opts) {
  p.validate();
  require(p.b1 != 0.0, "orthogonality_check: b1 must be nonzero");
  require(!eps_list.empty(), "orthogonality_check: empty eps list");
  OrthogonalityTable table;
  table.dim = n;
  const SpectrumResult whole = truncated_spectrum(model_sequence(p), n, opts);
  // Gamma(flip m) = F Gamma(m) F is unitarily equivalent to Gamma(m), so one
  // spectrum of the unit model serves both summands.
  const AsymDiscrete unit{p.alpha, 1.0, 0.0};
  const SpectrumResult part = p.bm1 == 0.0 ? whole : truncated_spectrum(model_sequence(unit), n, opts);

  // n±(eps; b Gamma(m)) in terms of the counts of Gamma(m) at eps / |b|.
  auto scaled = [&](double b, double eps) -> std::pair<std::size_t, std::size_t> {
    if (b == 0.0) return {0, 0};
    const auto [cp, cm] = counting_function(part, eps / std::abs(b));
    return b > 0 ? std::pair{cp, cm} : std::pair{cm, cp};
  };
  for (double eps : eps_list) {
    require(std::isfinite(eps) && eps > 0, "orthogonality_check: eps must be positive");
    OrthogonalityRow row;
    row.eps = eps;
    std::tie(row.n_plus, row.n_minus) = counting_function(whole, eps);
    if (p.bm1 == 0.0) {
      row.sum_plus = row.n_plus;
      row.sum_minus = row.n_minus;
    } else {
      const auto [a_p, a_m] = scaled(p.b1, eps);
      const auto [b_p, b_m] = scaled(p.bm1, eps);
      row.sum_plus = a_p + b_p;
      row.sum_minus = a_m + b_m;
    }
    auto diff = [](std::size_t a, std::size_t b) {
      return static_cast<double>(a > b ? a - b : b - a);
    };
    row.defect = (diff(row.n_plus, row.sum_plus) + diff(row.n_minus, row.sum_minus)) *
                 std::pow(eps, 1.0 / p.alpha);
    table.rows.push_back(row);
  }
  return table;
}

HsIdentity hs_identity(const DiscreteKernel& h, std::size_t n) {
  HsIdentity out;
  out.lhs = hankel_frobenius_sq(h, n);
  const Eigen::VectorXd ev = all_eigenvalues(build_truncated(h, n).to_dense());
  out.rhs = ev.squaredNorm();
  out.rel_err = out.lhs > 0 ? std::abs(out.lhs - out.rhs) / out.lhs : std::abs(out.rhs);
  return out;
}

// ---------------------------------------------------------------------------

FitWindow default_window(std::size_t n) { return {32, n / 64}; }

bool interlacing_holds(const SpectrumResult& smaller, const SpectrumResult& larger,
                       double rel_slack) {
  const double slack = rel_slack * std::max(smaller.norm_estimate, larger.norm_estimate);
  auto branch = [slack](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
      if (a[i] > b[i] + slack) return false;
    return true;
  };
  return branch(smaller.lambda_plus, larger.lambda_plus) &&
         branch(smaller.lambda_minus, larger.lambda_minus);
}

StudyReport convergence_study(const DiscreteKernel& h, double alpha,
                              const std::vector<std::size_t>& sizes,
                              const std::optional<FitWindow>& window, const StudyOptions& opts) {
  require(sizes.size() >= 3, "convergence_study: need at least three sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    require(sizes[i] >= 2 && (sizes[i] & (sizes[i] - 1)) == 0,
            "convergence_study: sizes must be powers of two");
    require(i == 0 || sizes[i] > sizes[i - 1], "convergence_study: sizes must increase");
  }
  StudyReport rep;
  rep.sizes = sizes;
  rep.spectra.resize(sizes.size());
  rep.fits.resize(sizes.size());

  auto cell = [&](std::size_t i) {
    const FitWindow w = window ? *window : default_window(sizes[i]);
    StudyOptions o = opts;
    o.lanczos_k = std::max(o.lanczos_k, w.last);
    rep.spectra[i] = truncated_spectrum(h, sizes[i], o);
    FitResult f = fit_both(rep.spectra[i], alpha, w);
    if (h.params() && h.params()->alpha == alpha) attach_prediction(f, c_pm_discrete(*h.params()));
    rep.fits[i] = std::move(f);
  };
  const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  for (std::size_t start = 0; start < sizes.size(); start += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(sizes.size(), start + jobs); ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, cell, i));
    for (auto& f : batch) f.get();
  }

  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    rep.interlacing_ok = rep.interlacing_ok && interlacing_holds(rep.spectra[i], rep.spectra[i + 1]);
  for (const auto& f : rep.fits)
    if (f.predicted_plus && f.plus.resolved) rep.drift_plus.push_back(std::abs(f.plus.c_hat - *f.predicted_plus));
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json branch_json(const BranchFit& b) {
  json j = {{"resolved", b.resolved},
            {"available", b.available},
            {"c_hat", b.c_hat},
            {"slope", b.slope},
            {"median", b.median},
            {"rms_residual", b.rms_residual}};
  if (!b.note.empty()) j["note"] = b.note;
  return j;
}

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

json to_json(const FitResult& f) {
  return {{"alpha", f.alpha},
          {"N", f.dim},
          {"window", {f.window.first, f.window.last}},
          {"model", "lambda_n n^alpha = c + s / log n"},
          {"c_hat_plus", f.c_hat_plus()},
          {"c_hat_minus", f.c_hat_minus()},
          {"c_predicted_plus", opt(f.predicted_plus)},
          {"c_predicted_minus", opt(f.predicted_minus)},
          {"rel_dev", {{"plus", opt(f.rel_dev_plus())}, {"minus", opt(f.rel_dev_minus())}}},
          {"plus", branch_json(f.plus)},
          {"minus", branch_json(f.minus)}};
}

json to_json(const EquivalenceTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"n", r.n}, {"rel_diff_plus", opt(r.rel_diff_plus)},
                    {"rel_diff_minus", opt(r.rel_diff_minus)}});
  return {{"rows", rows},
          {"max_rel_diff", t.max_rel_diff},
          {"depth_plus", t.depth_plus},
          {"depth_minus", t.depth_minus}};
}

json to_json(const OrthogonalityTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"eps", r.eps},
                    {"n_plus", r.n_plus},
                    {"n_minus", r.n_minus},
                    {"sum_plus", r.sum_plus},
                    {"sum_minus", r.sum_minus},
                    {"defect", r.defect}});
  return {{"N", t.dim}, {"rows", rows}, {"decreasing", t.decreasing()}};
}

json to_json(const StudyReport& r) {
  json fits = json::array();
  for (const auto& f : r.fits) fits.push_back(to_json(f));
  return {{"sizes", r.sizes},
          {"fits", fits},
          {"interlacing_ok", r.interlacing_ok},
          {"drift_plus", r.drift_plus}};
}

}  // namespace hankelspec
