#include "hankelspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <type_traits>

#include "hankelspec/errors.hpp"

namespace hankelspec {

using detail::require;

namespace {

// Splits (eigenvalue, residual) pairs into branches, dropping values at or
// below the resolution floor.
void split_branches(const Eigen::VectorXd& values, const Eigen::VectorXd& residuals,
                    SpectrumResult& out) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) norm = std::max(norm, std::abs(values[i]));
  out.norm_estimate = norm;
  const double floor = kResolutionFloor * norm;
  std::vector<std::pair<double, double>> plus, minus;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > floor) plus.emplace_back(values[i], residuals[i]);
    if (-values[i] > floor) minus.emplace_back(-values[i], residuals[i]);
  }
  auto desc = [](const auto& a, const auto& b) { return a.first > b.first; };
  std::sort(plus.begin(), plus.end(), desc);
  std::sort(minus.begin(), minus.end(), desc);
  for (auto [v, r] : plus) {
    out.lambda_plus.push_back(v);
    out.residual_plus.push_back(r);
  }
  for (auto [v, r] : minus) {
    out.lambda_minus.push_back(v);
    out.residual_minus.push_back(r);
  }
}

template <class Matrix>
SpectrumResult dense_impl(const Matrix& h) {
  require(h.rows() == h.cols(), "dense_eigs: matrix must be square");
  require(static_cast<std::size_t>(h.rows()) <= kMaxDenseDim,
          "dense_eigs: dimension exceeds the dense guard");
  SpectrumResult out;
  out.dim = static_cast<std::size_t>(h.rows());
  out.method = "dense";
  if (h.rows() == 0) return out;
  const double scale = h.cwiseAbs().maxCoeff();
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "dense_eigs: matrix is not symmetric (asymmetry " << asym << ")";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::ComputeEigenvectors);
  require(es.info() == Eigen::Success, "dense_eigs: eigensolver failed");
  const Eigen::VectorXd vals = es.eigenvalues();
  const Matrix r = h * es.eigenvectors() - es.eigenvectors() * vals.cast<typename Matrix::Scalar>().asDiagonal();
  const Eigen::VectorXd res = r.colwise().norm().transpose();
  split_branches(vals, res, out);
  return out;
}

}  // namespace

double SpectrumResult::resolved_eps_plus() const {
  if (complete_plus || lambda_plus.empty()) return floor();
  return lambda_plus.back();
}

double SpectrumResult::resolved_eps_minus() const {
  if (complete_minus || lambda_minus.empty()) return floor();
  return lambda_minus.back();
}

SpectrumResult dense_eigs(const Eigen::MatrixXd& h) { return dense_impl(h); }
SpectrumResult dense_eigs(const Eigen::MatrixXcd& h) { return dense_impl(h); }

SpectrumResult dense_eigs(const HankelOperator& op) {
  if (op.is_complex()) return dense_impl(op.to_dense_complex());
  return dense_impl(op.to_dense());
}

Eigen::VectorXd all_eigenvalues(const Eigen::MatrixXd& h) {
  require(h.rows() == h.cols(), "all_eigenvalues: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "all_eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

LinearMap as_linear_map(const HankelOperator& op) {
  require(!op.is_complex(), "as_linear_map: block operators are complex");
  return [op](std::span<const double> u, std::span<double> out) { op.apply(u, out); };
}

// ---------------------------------------------------------------------------
// Lanczos

namespace {

struct RitzBranch {
  std::vector<double> values;     // resolved Ritz values, |.| non-increasing
  std::vector<double> residuals;  // matching Ritz residuals
};

template <class Scalar>
using VectorOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
void fill_random(VectorOf<Scalar>& v, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = normal(rng);
    } else {
      const double re = normal(rng);
      v[i] = Scalar(re, normal(rng));
    }
  }
  v.normalize();
}

template <class Scalar, class Map>
void check_symmetry(const Map& apply, std::size_t dim, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  VectorOf<Scalar> u(n), v(n), au(n), av(n);
  for (int trial = 0; trial < 3; ++trial) {
    fill_random<Scalar>(u, rng);
    fill_random<Scalar>(v, rng);
    apply({u.data(), dim}, {au.data(), dim});
    apply({v.data(), dim}, {av.data(), dim});
    const Scalar lhs = v.dot(au);  // <v, Au>
    const Scalar rhs = av.dot(u);  // <Av, u>
    const double scale = std::max({au.norm(), av.norm(), 1.0});
    if (std::abs(lhs - rhs) > 1e-8 * scale) {
      std::ostringstream os;
      os << "lanczos_extreme: operator fails the symmetry probe (|<Au,v> - <u,Av>| = "
         << std::abs(lhs - rhs) << ")";
      throw ValidationError(os.str());
    }
  }
}

template <class Scalar, class Map>
SpectrumResult lanczos_impl(const Map& apply, std::size_t dim, const LanczosOptions& opts) {
  require(dim >= 1, "lanczos_extreme: dimension must be positive");
  require(opts.k >= 1, "lanczos_extreme: k must be positive");
  require(opts.tol > 0, "lanczos_extreme: tolerance must be positive");
  using Vector = VectorOf<Scalar>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::mt19937_64 rng(opts.seed);
  check_symmetry<Scalar>(apply, dim, rng);

  const std::size_t max_iter = std::min(dim, opts.max_iter ? opts.max_iter : 6 * opts.k + 200);
  const auto n = static_cast<Eigen::Index>(dim);

  Matrix basis(n, static_cast<Eigen::Index>(std::min<std::size_t>(max_iter + 1, 64)));
  Vector v(n);
  fill_random<Scalar>(v, rng);
  basis.col(0) = v;

  std::vector<double> diag, offdiag;
  Vector w(n);

  auto ritz = [&](std::size_t m, double beta_last, RitzBranch& plus, RitzBranch& minus) {
    const auto mm = static_cast<Eigen::Index>(m);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), mm);
    Eigen::VectorXd e(std::max<Eigen::Index>(mm - 1, 0));
    for (Eigen::Index i = 0; i + 1 < mm; ++i) e[i] = offdiag[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd theta = es.eigenvalues();
    const Eigen::VectorXd bottom = es.eigenvectors().row(mm - 1).transpose();
    const double norm = theta.cwiseAbs().maxCoeff();
    const double floor = kResolutionFloor * norm;
    plus = {};
    minus = {};
    for (Eigen::Index i = theta.size() - 1; i >= 0; --i)
      if (theta[i] > floor) {
        plus.values.push_back(theta[i]);
        plus.residuals.push_back(std::abs(beta_last * bottom[i]));
      }
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      if (-theta[i] > floor) {
        minus.values.push_back(-theta[i]);
        minus.residuals.push_back(std::abs(beta_last * bottom[i]));
      }
    return norm;
  };

  // Ritz values converge from the extremes inward; count the converged prefix.
  auto converged_prefix = [](const RitzBranch& b, double tol_abs) {
    std::size_t c = 0;
    while (c < b.values.size() && b.residuals[c] <= tol_abs) ++c;
    return c;
  };

  RitzBranch plus, minus;
  double norm = 0.0;
  std::size_t m = 0, last_check = 0;
  std::size_t prev_count_plus = 0, prev_count_minus = 0;
  bool prev_ok_plus = false, prev_ok_minus = false;
  bool exhausted = false;
  for (std::size_t j = 0; j < max_iter; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    apply({basis.col(jj).data(), dim}, {w.data(), dim});
    const double a = std::real(basis.col(jj).dot(w));
    w -= a * basis.col(jj);
    if (j > 0) w -= offdiag[j - 1] * basis.col(jj - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeff = basis.leftCols(jj + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(jj + 1) * coeff;
    }
    const double b = w.norm();
    diag.push_back(a);
    offdiag.push_back(b);
    m = j + 1;

    double scale = 0.0;
    for (double x : diag) scale = std::max(scale, std::abs(x));
    for (double x : offdiag) scale = std::max(scale, std::abs(x));
    const bool breakdown = b <= 1e-14 * std::max(scale, 1e-300) || m == dim;

    const std::size_t interval = std::max(opts.check_every, m / 10);
    if (breakdown || m == max_iter || m - last_check >= interval) {
      last_check = m;
      // After breakdown the Krylov space is invariant and every Ritz pair is exact.
      norm = ritz(m, breakdown ? 0.0 : b, plus, minus);
      if (breakdown) {
        exhausted = true;
        break;
      }
      const double tol_abs = opts.tol * norm;
      const std::size_t cp = converged_prefix(plus, tol_abs);
      const std::size_t cm = converged_prefix(minus, tol_abs);
      const std::size_t need_p = std::min(opts.k, plus.values.size());
      const std::size_t need_m = std::min(opts.k, minus.values.size());
      const bool ok_p = cp >= need_p;
      const bool ok_m = cm >= need_m;
      const bool done_p =
          ok_p && (need_p == opts.k || (prev_ok_plus && prev_count_plus == plus.values.size()));
      const bool done_m =
          ok_m && (need_m == opts.k || (prev_ok_minus && prev_count_minus == minus.values.size()));
      prev_ok_plus = ok_p;
      prev_ok_minus = ok_m;
      prev_count_plus = plus.values.size();
      prev_count_minus = minus.values.size();
      if (done_p && done_m) break;
      if (m == max_iter) {
        std::ostringstream os;
        os << "lanczos_extreme: no convergence after " << m << " iterations; converged " << cp
           << "/" << need_p << " (+) and " << cm << "/" << need_m
           << " (-) requested Ritz values, tolerance " << tol_abs << "; residuals (+):";
        for (std::size_t i = 0; i < need_p; ++i) os << ' ' << plus.residuals[i];
        os << "; residuals (-):";
        for (std::size_t i = 0; i < need_m; ++i) os << ' ' << minus.residuals[i];
        throw ConvergenceError(os.str());
      }
    }

    if (jj + 1 >= basis.cols())
      basis.conservativeResize(
          Eigen::NoChange,
          std::min<Eigen::Index>(2 * basis.cols(), static_cast<Eigen::Index>(max_iter) + 1));
    basis.col(jj + 1) = w / b;
  }

  SpectrumResult out;
  out.dim = dim;
  out.method = "lanczos";
  out.iterations = m;
  out.norm_estimate = norm;
  auto take = [&](const RitzBranch& br, std::vector<double>& vals, std::vector<double>& res,
                  bool& complete) {
    const std::size_t count = std::min(opts.k, br.values.size());
    vals.assign(br.values.begin(), br.values.begin() + static_cast<std::ptrdiff_t>(count));
    res.assign(br.residuals.begin(), br.residuals.begin() + static_cast<std::ptrdiff_t>(count));
    complete = br.values.size() < opts.k || (exhausted && br.values.size() == opts.k);
  };
  take(plus, out.lambda_plus, out.residual_plus, out.complete_plus);
  take(minus, out.lambda_minus, out.residual_minus, out.complete_minus);
  return out;
}

}  // namespace

SpectrumResult lanczos_extreme(const LinearMap& apply, std::size_t dim, const LanczosOptions& opts) {
  return lanczos_impl<double>(apply, dim, opts);
}

SpectrumResult lanczos_extreme(const ComplexLinearMap& apply, std::size_t dim,
                               const LanczosOptions& opts) {
  return lanczos_impl<std::complex<double>>(apply, dim, opts);
}

std::pair<std::size_t, std::size_t> counting_function(const SpectrumResult& s, double eps) {
  require(std::isfinite(eps) && eps > 0, "counting_function: eps must be positive");
  if (eps < s.resolved_eps_plus() || eps < s.resolved_eps_minus()) {
    std::ostringstream os;
    os << "counting_function: eps = " << eps << " is below the resolved level (+: "
       << s.resolved_eps_plus() << ", -: " << s.resolved_eps_minus() << ")";
    throw ResolutionError(os.str());
  }
  auto count = [eps](const std::vector<double>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [eps](double x) { return x > eps; }));
  };
  return {count(s.lambda_plus), count(s.lambda_minus)};
}

std::string to_csv(const SpectrumResult& s) {
  std::string out = "n,lambda_plus,residual_plus,lambda_minus,residual_minus\n";
  const std::size_t rows = std::max(s.lambda_plus.size(), s.lambda_minus.size());
  char buf[64];
  auto cell = [&](const std::vector<double>& v, std::size_t i) {
    if (i >= v.size()) return std::string();
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1);
    out += ',' + cell(s.lambda_plus, i) + ',' + cell(s.residual_plus, i) + ',' +
           cell(s.lambda_minus, i) + ',' + cell(s.residual_minus, i) + '\n';
  }
  return out;
}

nlohmann::json summary_json(const SpectrumResult& s) {
  return {{"N", s.dim},
          {"method", s.method},
          {"iterations", s.iterations},
          {"norm_estimate", s.norm_estimate},
          {"resolution_floor", s.floor()},
          {"count_plus", s.lambda_plus.size()},
          {"count_minus", s.lambda_minus.size()},
          {"complete_plus", s.complete_plus},
          {"complete_minus", s.complete_minus}};
}

}  // namespace hankelspec
