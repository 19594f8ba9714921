#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hankelspec/asymptotics.hpp"
#include "hankelspec/kernels.hpp"
#include "hankelspec/spectra.hpp"

namespace hankelspec {

struct FitWindow {
  std::size_t first = 64;  // 1-based eigenvalue index
  std::size_t last = 512;

  std::size_t size() const { return last >= first ? last - first + 1 : 0; }
};

/// Fit of lambda_n n^alpha = c + s / log n on one branch.
struct BranchFit {
  bool resolved = false;      // the window lies inside the resolved spectrum
  std::size_t available = 0;  // resolved eigenvalues on this branch
  double c_hat = 0.0;
  double slope = 0.0;
  double median = 0.0;  // median of lambda_n n^alpha over the window
  double rms_residual = 0.0;
  std::string note;
};

struct FitResult {
  double alpha = 0.0;
  FitWindow window;
  std::size_t dim = 0;
  BranchFit plus;
  BranchFit minus;
  std::optional<double> predicted_plus;
  std::optional<double> predicted_minus;

  double c_hat_plus() const { return plus.c_hat; }
  double c_hat_minus() const { return minus.c_hat; }
  /// |c_hat+ - c+| / c+ when a prediction is attached.
  std::optional<double> rel_dev_plus() const;
  std::optional<double> rel_dev_minus() const;
};

/// Least-squares fit on both branches. A branch whose window is not resolved
/// is left unfitted with resolved = false. Throws ValidationError for windows
/// shorter than 16 and ResolutionError when neither branch resolves it.
FitResult fit_coefficient(const SpectrumResult& s, double alpha, const FitWindow& window);

/// Attaches c^± from the asymptotic formula.
void attach_prediction(FitResult& fit, const CoefficientReport& predicted);

/// Same fit on a plain sequence lambda_1, lambda_2, ... (used for synthetic data).
BranchFit fit_branch(const std::vector<double>& lambdas, double alpha, const FitWindow& window);

struct EquivalenceRow {
  std::size_t n = 0;
  std::optional<double> rel_diff_plus;
  std::optional<double> rel_diff_minus;
};

struct EquivalenceTable {
  std::vector<EquivalenceRow> rows;
  double max_rel_diff = 0.0;
  std::size_t depth_plus = 0;   // indices compared on the + branch
  std::size_t depth_minus = 0;
};

/// Per-index relative differences |a_n - b_n| / max(|a_n|, |b_n|) for n <= k
/// on each branch. A branch compares min(k, resolved) indices; if the two
/// sides resolve different depths below k the comparison is a depth mismatch
/// and throws ResolutionError.
EquivalenceTable psido_equivalence(const SpectrumResult& h_side, const SpectrumResult& psi_side,
                                   std::size_t k);

struct OrthogonalityRow {
  double eps = 0.0;
  std::size_t n_plus = 0, n_minus = 0;
  std::size_t sum_plus = 0, sum_minus = 0;  // counts of b1 Gamma(h1) plus bm1 Gamma(h-1)
  double defect = 0.0;  // (|n+ - sum+| + |n- - sum-|) eps^(1/alpha)
};

struct OrthogonalityTable {
  std::vector<OrthogonalityRow> rows;
  std::size_t dim = 0;
  bool decreasing() const;
};

struct StudyOptions {
  std::size_t lanczos_k = 64;
  std::size_t dense_limit = 4096;  // dense solver up to this N, Lanczos beyond
  /// Worker threads for independent study cells.
  std::size_t jobs = 1;
};

/// Spectrum of the N x N truncation of Gamma(h); dense for small N,
/// matrix-free Lanczos otherwise.
SpectrumResult truncated_spectrum(const DiscreteKernel& h, std::size_t n,
                                  const StudyOptions& opts = {});

/// Counting functions of Gamma(h) against those of b1 Gamma(m) and
/// bm1 Gamma(flip m), all at truncation N. Requires b1, bm1 both nonzero,
/// except that bm1 = 0 is accepted and yields a zero defect.
OrthogonalityTable orthogonality_check(const AsymDiscrete& p, const std::vector<double>& eps_list,
                                       std::size_t n, const StudyOptions& opts = {});

struct HsIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

/// Squared Frobenius norm of the truncation from the kernel weights against
/// the sum of squared eigenvalues.
HsIdentity hs_identity(const DiscreteKernel& h, std::size_t n);

struct StudyReport {
  std::vector<std::size_t> sizes;
  std::vector<FitResult> fits;
  std::vector<SpectrumResult> spectra;
  /// lambda_n^+(N) non-decreasing in N for every n resolved at both sizes.
  bool interlacing_ok = true;
  std::vector<double> drift_plus;  // |c_hat+(N) - c+|
};

/// Default window for size N: [32, N/64], or the explicit window if given.
FitWindow default_window(std::size_t n);

StudyReport convergence_study(const DiscreteKernel& h, double alpha,
                              const std::vector<std::size_t>& sizes,
                              const std::optional<FitWindow>& window = std::nullopt,
                              const StudyOptions& opts = {});

/// Checks Cauchy interlacing lambda_n(small) <= lambda_n(large) on both branches.
bool interlacing_holds(const SpectrumResult& smaller, const SpectrumResult& larger,
                       double rel_slack = 1e-10);

nlohmann::json to_json(const FitResult& f);
nlohmann::json to_json(const EquivalenceTable& t);
nlohmann::json to_json(const OrthogonalityTable& t);
nlohmann::json to_json(const StudyReport& r);

}  // namespace hankelspec
