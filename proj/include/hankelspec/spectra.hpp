#pragma once

#include <cstddef>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hankelspec/hankel.hpp"

namespace hankelspec {

/// Eigenvalues with |lambda| below this fraction of the largest |lambda| are
/// treated as unresolved.
inline constexpr double kResolutionFloor = 1e-12;

/// Two-sided spectrum of a symmetric operator.
///
/// lambda_plus holds the positive eigenvalues in non-increasing order,
/// lambda_minus the absolute values of the negative ones, also
/// non-increasing. A branch is `complete` when every eigenvalue above the
/// resolution floor was found; otherwise it was cut at the requested depth.
struct SpectrumResult {
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;
  std::vector<double> residual_plus;
  std::vector<double> residual_minus;
  std::size_t dim = 0;
  double norm_estimate = 0.0;
  bool complete_plus = true;
  bool complete_minus = true;
  std::size_t iterations = 0;
  std::string method;

  /// Absolute threshold below which eigenvalues are unresolved.
  double floor() const { return kResolutionFloor * norm_estimate; }
  /// Smallest eps for which counting_function is trustworthy on each branch.
  double resolved_eps_plus() const;
  double resolved_eps_minus() const;
};

/// Full spectrum via Eigen's self-adjoint solver, split into branches.
/// Rejects matrices whose asymmetry exceeds 1e-10 relative to the max entry,
/// and dimensions above kMaxDenseDim.
SpectrumResult dense_eigs(const Eigen::MatrixXd& h);
SpectrumResult dense_eigs(const Eigen::MatrixXcd& h);
SpectrumResult dense_eigs(const HankelOperator& op);

/// All eigenvalues in ascending order, no floor applied.
Eigen::VectorXd all_eigenvalues(const Eigen::MatrixXd& h);

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
using ComplexLinearMap = std::function<void(std::span<const std::complex<double>>,
                                            std::span<std::complex<double>>)>;

LinearMap as_linear_map(const HankelOperator& op);

struct LanczosOptions {
  /// Requested depth on each branch.
  std::size_t k = 10;
  /// Krylov dimension cap; 0 picks min(dim, 6k + 200).
  std::size_t max_iter = 0;
  /// Ritz residual tolerance relative to the norm estimate.
  double tol = 1e-9;
  std::uint64_t seed = 20141208;
  /// Iterations between convergence checks.
  std::size_t check_every = 10;
};

/// Extreme eigenvalues of both signs from one Lanczos tridiagonalization with
/// full (twice-applied Gram-Schmidt) reorthogonalization and a seeded start
/// vector. A branch stops growing once its resolved Ritz values have all
/// converged and no new ones appeared over the last check window.
/// Throws ConvergenceError (with achieved residuals in the message) if the
/// iteration cap is hit first, ValidationError if `apply` fails the
/// randomized symmetry probe.
SpectrumResult lanczos_extreme(const LinearMap& apply, std::size_t dim,
                               const LanczosOptions& opts);
/// Same for a Hermitian operator on C^dim.
SpectrumResult lanczos_extreme(const ComplexLinearMap& apply, std::size_t dim,
                               const LanczosOptions& opts);

/// (#{n: lambda_n^+ > eps}, #{n: lambda_n^- > eps}). Throws ResolutionError
/// when eps is below what the spectrum resolves on either branch.
std::pair<std::size_t, std::size_t> counting_function(const SpectrumResult& s, double eps);

/// CSV with header n,lambda_plus,residual_plus,lambda_minus,residual_minus;
/// a branch shorter than the other leaves its cells empty.
std::string to_csv(const SpectrumResult& s);

/// Summary without the eigenvalue arrays.
nlohmann::json summary_json(const SpectrumResult& s);

}  // namespace hankelspec
