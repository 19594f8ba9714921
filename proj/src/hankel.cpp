#include "hankelspec/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "hankelspec/errors.hpp"

namespace hankelspec {

using detail::require;

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

/// Circulant embedding of the reversed Hankel form: with v = reverse(u),
/// (H u)_i = (c * v)_{i + N - 1} where c = h(0..2N-2).
class FftHankel {
 public:
  FftHankel(std::vector<double> coeffs, std::size_t n) : n_(n), len_(next_pow2(2 * n - 1)) {
    std::vector<double> buf(len_, 0.0);
    std::copy(coeffs.begin(), coeffs.end(), buf.begin());
    spectrum_.resize(len_ / 2 + 1);
    std::vector<double> in(len_);
    std::vector<std::complex<double>> out(len_ / 2 + 1);
    {
      std::lock_guard lock(fftw_planner_mutex());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(len_), in.data(),
                                      reinterpret_cast<fftw_complex*>(out.data()), flags);
      backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(len_),
                                       reinterpret_cast<fftw_complex*>(out.data()), in.data(),
                                       flags);
    }
    fftw_execute_dft_r2c(forward_, buf.data(),
                         reinterpret_cast<fftw_complex*>(spectrum_.data()));
  }
  FftHankel(const FftHankel&) = delete;
  FftHankel& operator=(const FftHankel&) = delete;
  ~FftHankel() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void apply(std::span<const double> u, std::span<double> out) const {
    std::vector<double> buf(len_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) buf[k] = u[n_ - 1 - k];
    std::vector<std::complex<double>> freq(len_ / 2 + 1);
    fftw_execute_dft_r2c(forward_, buf.data(), reinterpret_cast<fftw_complex*>(freq.data()));
    for (std::size_t m = 0; m < freq.size(); ++m) freq[m] *= spectrum_[m];
    // c2r destroys its input; freq is scratch.
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(freq.data()), buf.data());
    const double scale = 1.0 / static_cast<double>(len_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i + n_ - 1] * scale;
  }

 private:
  std::size_t n_;
  std::size_t len_;
  std::vector<std::complex<double>> spectrum_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

LogGrid LogGrid::make(double half_width, std::size_t n) {
  require(std::isfinite(half_width) && half_width > 0, "LogGrid: half-width must be positive");
  require(n >= 2, "LogGrid: need at least two nodes");
  LogGrid g;
  g.half_width = half_width;
  g.n = n;
  g.nodes.resize(n);
  g.weights.resize(n);
  const double du = 2.0 * half_width / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = -half_width + du * static_cast<double>(i);
    g.nodes[i] = std::exp(u);
    g.weights[i] = g.nodes[i] * du;
  }
  return g;
}

const char* to_string(HankelKind k) {
  switch (k) {
    case HankelKind::dense: return "dense";
    case HankelKind::fft: return "fft";
    case HankelKind::integral: return "integral";
    case HankelKind::block: return "block";
  }
  return "?";
}

void HankelOperator::apply(std::span<const double> u, std::span<double> out) const {
  if (u.size() != dim_ || out.size() != dim_) {
    std::ostringstream os;
    os << "matvec: dimension mismatch (operator " << dim_ << ", input " << u.size() << ", output "
       << out.size() << ")";
    throw ValidationError(os.str());
  }
  require(!is_complex(), "apply: block operators are complex; use to_dense_complex");
  if (fft_) {
    fft_->apply(u, out);
    return;
  }
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(out.size()));
  y.noalias() = (*dense_) * x;
}

Eigen::VectorXd HankelOperator::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  apply(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
        std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

Eigen::MatrixXd HankelOperator::to_dense() const {
  require(!is_complex(), "to_dense: block operator is complex");
  if (dense_) return *dense_;
  require(dim_ <= kMaxDenseDim, "to_dense: dimension exceeds the dense guard");
  Eigen::MatrixXd m(dim_, dim_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t j = 0; j < dim_; ++j) {
    e[static_cast<Eigen::Index>(j)] = 1.0;
    m.col(static_cast<Eigen::Index>(j)) = apply(e);
    e[static_cast<Eigen::Index>(j)] = 0.0;
  }
  return m;
}

Eigen::MatrixXcd HankelOperator::to_dense_complex() const {
  if (complex_) return *complex_;
  return to_dense().cast<std::complex<double>>();
}

HankelOperator build_truncated(const DiscreteKernel& h, std::size_t n) {
  require(n >= 1, "build_truncated: N must be at least 1");
  if (n > kMaxDenseDim) {
    std::ostringstream os;
    os << "build_truncated: N = " << n << " exceeds the dense limit " << kMaxDenseDim
       << "; request a matrix-free operator";
    throw ValidationError(os.str());
  }
  const std::vector<double> c = h.samples(2 * n - 1);
  auto m = std::make_shared<Eigen::MatrixXd>(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      (*m)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i + j];
  HankelOperator op;
  op.kind_ = HankelKind::dense;
  op.dim_ = n;
  op.dense_ = std::move(m);
  return op;
}

HankelOperator build_matrix_free(const DiscreteKernel& h, std::size_t n) {
  require(n >= 1, "build_matrix_free: N must be at least 1");
  HankelOperator op;
  op.kind_ = HankelKind::fft;
  op.dim_ = n;
  op.fft_ = std::make_shared<const FftHankel>(h.samples(2 * n - 1), n);
  return op;
}

Eigen::VectorXd matvec(const HankelOperator& op, const Eigen::VectorXd& u) {
  if (op.is_complex()) {
    require(static_cast<std::size_t>(u.size()) == op.dim(), "matvec: dimension mismatch");
    return (op.to_dense_complex() * u.cast<std::complex<double>>()).real();
  }
  return op.apply(u);
}

DiscreteKernel flip_conjugate(const DiscreteKernel& h) {
  std::vector<std::pair<std::int64_t, double>> ov;
  for (const auto& [j, v] : h.overrides()) ov.emplace_back(j, (j % 2 == 0) ? v : -v);
  DiscreteKernel base = h.with_overrides({});
  std::optional<AsymDiscrete> params = h.params();
  if (params) std::swap(params->b1, params->bm1);
  DiscreteKernel out(
      [base](std::int64_t j) { return (j % 2 == 0) ? base(j) : -base(j); }, std::move(ov), params);
  if (h.description()) {
    const auto& d = *h.description();
    if (d.value("type", "") == "discrete_model") {
      nlohmann::json f = d;
      f["b1"] = d.at("bm1");
      f["bm1"] = d.at("b1");
      out = out.with_description(f).with_overrides(out.overrides());
    }
  }
  return out;
}

HankelOperator discretize_integral(const ContinuousKernel& h, const LogGrid& grid) {
  const std::size_t n = grid.nodes.size();
  require(n == grid.weights.size() && n >= 1, "discretize_integral: malformed grid");
  auto m = std::make_shared<Eigen::MatrixXd>(n, n);
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(grid.weights[i]);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double t = grid.nodes[i] + grid.nodes[j];
      double v;
      try {
        v = h(t);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "discretize_integral: kernel failed at nodes (" << i << ", " << j << "), t_i + t_j = "
           << t << ": " << e.what();
        throw Error(os.str());
      }
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "discretize_integral: non-finite kernel value at nodes (" << i << ", " << j
           << "), t_i + t_j = " << t;
        throw Error(os.str());
      }
      const double k = sw[i] * sw[j] * v;
      (*m)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
      (*m)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
    }
  }
  HankelOperator op;
  op.kind_ = HankelKind::integral;
  op.dim_ = n;
  op.dense_ = std::move(m);
  op.grid_ = std::make_shared<const LogGrid>(grid);
  return op;
}

HankelOperator block_build(const BlockKernel& h, std::size_t n) {
  require(n >= 1, "block_build: N must be at least 1");
  require(h.block_dim >= 1 && h.block_dim <= 8, "block_build: block dimension must be in [1, 8]");
  const auto k = static_cast<std::size_t>(h.block_dim);
  require(n * k <= kMaxDenseDim, "block_build: dimension exceeds the dense guard");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(2 * n - 1);
  for (std::size_t j = 0; j + 1 < 2 * n; ++j) blocks.push_back(h(static_cast<std::int64_t>(j)));
  auto m = std::make_shared<Eigen::MatrixXcd>(n * k, n * k);
  const auto kk = static_cast<Eigen::Index>(k);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      m->block(static_cast<Eigen::Index>(i) * kk, static_cast<Eigen::Index>(j) * kk, kk, kk) =
          blocks[i + j];
  HankelOperator op;
  op.kind_ = HankelKind::block;
  op.dim_ = n * k;
  op.block_ = k;
  op.complex_ = std::move(m);
  return op;
}

double hankel_frobenius_sq(const DiscreteKernel& h, std::size_t n) {
  require(n >= 1, "N must be at least 1");
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < 2 * n; ++j) {
    const double v = h(static_cast<std::int64_t>(j));
    s += v * v * static_cast<double>(std::min(j + 1, 2 * n - 1 - j));
  }
  return s;
}

}  // namespace hankelspec
