#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hankelspec/kernels.hpp"

namespace hankelspec {

/// Largest dimension for which a dense matrix is materialized.
inline constexpr std::size_t kMaxDenseDim = std::size_t{1} << 14;

/// Exponential grid t_i = exp(u_i), u_i uniform on [-L, L], with trapezoid
/// weights w_i = t_i du in the u variable.
struct LogGrid {
  double half_width = 14.0;
  std::size_t n = 2048;
  std::vector<double> nodes;
  std::vector<double> weights;

  static LogGrid make(double half_width, std::size_t n);
};

enum class HankelKind { dense, fft, integral, block };

const char* to_string(HankelKind k);

class FftHankel;

/// A truncated Hankel operator. Real kinds act on R^N; the block kind is a
/// complex Hermitian (N k) x (N k) matrix.
class HankelOperator {
 public:
  HankelKind kind() const { return kind_; }
  /// Total scalar dimension (N times the block size).
  std::size_t dim() const { return dim_; }
  std::size_t block_size() const { return block_; }
  bool is_complex() const { return kind_ == HankelKind::block; }

  /// out = H u for the real kinds.
  void apply(std::span<const double> u, std::span<double> out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

  /// Dense copy of a real operator. Throws for dim > kMaxDenseDim.
  Eigen::MatrixXd to_dense() const;
  /// Dense Hermitian matrix; valid for every kind.
  Eigen::MatrixXcd to_dense_complex() const;

  /// Grid of an integral-discretized operator, nullptr otherwise.
  const LogGrid* grid() const { return grid_.get(); }

 private:
  friend HankelOperator build_truncated(const DiscreteKernel&, std::size_t);
  friend HankelOperator build_matrix_free(const DiscreteKernel&, std::size_t);
  friend HankelOperator discretize_integral(const ContinuousKernel&, const LogGrid&);
  friend HankelOperator block_build(const BlockKernel&, std::size_t);

  HankelKind kind_ = HankelKind::dense;
  std::size_t dim_ = 0;
  std::size_t block_ = 1;
  std::shared_ptr<const Eigen::MatrixXd> dense_;
  std::shared_ptr<const Eigen::MatrixXcd> complex_;
  std::shared_ptr<const FftHankel> fft_;
  std::shared_ptr<const LogGrid> grid_;
};

/// Dense N x N matrix with entries h(i + j). Throws for N > kMaxDenseDim;
/// larger sizes go through build_matrix_free.
HankelOperator build_truncated(const DiscreteKernel& h, std::size_t n);

/// Matrix-free N x N Hankel operator applied in O(N log N) via reversal and
/// circulant embedding of h(0..2N-2) into the next power of two >= 2N-1.
HankelOperator build_matrix_free(const DiscreteKernel& h, std::size_t n);

/// Gamma(h) u, dispatching on the operator kind.
Eigen::VectorXd matvec(const HankelOperator& op, const Eigen::VectorXd& u);

/// h_(j) = (-1)^j h(j); Gamma(h_) = F Gamma(h) F with F = diag((-1)^j).
DiscreteKernel flip_conjugate(const DiscreteKernel& h);

/// K_ij = sqrt(w_i w_j) h(t_i + t_j). Only the upper triangle is evaluated
/// and then mirrored, so K is exactly symmetric.
HankelOperator discretize_integral(const ContinuousKernel& h, const LogGrid& grid);

/// Block Hankel matrix with blocks h(i + j), 0 <= i, j < N.
HankelOperator block_build(const BlockKernel& h, std::size_t n);

/// Sum_{j=0}^{2N-2} h(j)^2 min(j+1, 2N-1-j): squared Frobenius norm of the
/// N x N truncation.
double hankel_frobenius_sq(const DiscreteKernel& h, std::size_t n);

}  // namespace hankelspec
