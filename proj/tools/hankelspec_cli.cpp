#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hankelspec/asymptotics.hpp"
#include "hankelspec/errors.hpp"
#include "hankelspec/hankel.hpp"
#include "hankelspec/laplace.hpp"
#include "hankelspec/psido.hpp"
#include "hankelspec/spectra.hpp"
#include "hankelspec/verify.hpp"

using namespace hankelspec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct RunConfig {
  std::string command;
  double alpha = 1.0;
  double b1 = 1.0, bm1 = 0.0;
  std::optional<double> b0, binf;
  std::string kernel;  // JSON text or @file
  std::string matrix;  // JSON file with b0/binf matrices
  std::size_t n = 1024;
  std::size_t k = 64;
  double grid_l = 14.0;
  double x_half = 40.0;
  std::size_t m = 1 << 14;
  std::vector<std::size_t> window;
  std::vector<double> eps{0.05, 0.02, 0.01};
  std::vector<double> t_large{1e2, 1e3, 1e4, 1e5, 1e6};
  std::vector<double> t_small{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  int power = 0;
  double gamma = 2.0;
  std::size_t n_from = 4, n_to = 12;
  std::vector<std::size_t> sizes{1 << 12, 1 << 13, 1 << 14};
  double tol = 0.03;
  std::uint64_t seed = 20141208;
  std::size_t jobs = 1;
  std::string out, csv;

  json to_json() const {
    json j{{"command", command}, {"alpha", alpha}, {"b1", b1},         {"bm1", bm1},
           {"N", n},             {"k", k},         {"L", grid_l},      {"x_half", x_half},
           {"M", m},             {"eps", eps},     {"t_large", t_large}, {"t_small", t_small},
           {"m", power},         {"gamma", gamma}, {"n_from", n_from}, {"n_to", n_to},
           {"sizes", sizes},     {"tol", tol},     {"seed", seed},     {"jobs", jobs}};
    j["b0"] = b0 ? json(*b0) : json(nullptr);
    j["binf"] = binf ? json(*binf) : json(nullptr);
    j["kernel"] = kernel.empty() ? json(nullptr) : json(kernel);
    j["matrix"] = matrix.empty() ? json(nullptr) : json(matrix);
    j["window"] = window;
    return j;
  }
};

void write_atomic(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + tmp.string());
    f << text;
  }
  fs::rename(tmp, p);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_atomic(path, text);
}

json read_json_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream f(arg.substr(1));
    if (!f) throw ValidationError("cannot read " + arg.substr(1));
    return json::parse(f);
  }
  return json::parse(arg);
}

const std::vector<std::string> kContinuousTypes{"continuous_model", "exponential", "carleman"};

bool continuous_requested(const RunConfig& c) {
  if (!c.kernel.empty()) {
    const auto j = read_json_arg(c.kernel);
    const auto t = j.value("type", std::string());
    return std::find(kContinuousTypes.begin(), kContinuousTypes.end(), t) != kContinuousTypes.end();
  }
  return c.b0.has_value() || c.binf.has_value();
}

DiscreteKernel discrete_kernel(const RunConfig& c) {
  if (!c.kernel.empty()) return discrete_kernel_from_json(read_json_arg(c.kernel));
  return model_sequence({c.alpha, c.b1, c.bm1});
}

ContinuousKernel continuous_kernel(const RunConfig& c) {
  if (!c.kernel.empty()) return continuous_kernel_from_json(read_json_arg(c.kernel));
  return model_kernel({c.alpha, c.b0.value_or(0), c.binf.value_or(0)}, smooth_cutoffs());
}

StudyOptions study_options(const RunConfig& c) {
  StudyOptions so;
  so.lanczos_k = c.k;
  so.jobs = c.jobs;
  return so;
}

SpectrumResult spectrum_of(const RunConfig& c) {
  if (continuous_requested(c)) {
    const auto op = discretize_integral(continuous_kernel(c), LogGrid::make(c.grid_l, c.n));
    if (c.n <= 4096) return dense_eigs(op);
    LanczosOptions lo;
    lo.k = c.k;
    lo.seed = c.seed;
    return lanczos_extreme(as_linear_map(op), op.dim(), lo);
  }
  return truncated_spectrum(discrete_kernel(c), c.n, study_options(c));
}

std::optional<CoefficientReport> prediction(const RunConfig& c) {
  if (continuous_requested(c)) {
    const auto k = continuous_kernel(c);
    if (k.params && k.params->alpha == c.alpha) return c_pm_continuous(*k.params);
    return std::nullopt;
  }
  const auto h = discrete_kernel(c);
  if (h.params() && h.params()->alpha == c.alpha) return c_pm_discrete(*h.params());
  return std::nullopt;
}

FitWindow window_of(const RunConfig& c) {
  if (c.window.empty()) return default_window(c.n);
  if (c.window.size() != 2) throw ValidationError("--window takes two indices");
  return {c.window[0], c.window[1]};
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ValidationError("matrix must be square");
    for (Eigen::Index s = 0; s < n; ++s) {
      const auto& e = row[static_cast<std::size_t>(s)];
      m(r, s) = e.is_array() ? std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>())
                             : std::complex<double>(e.get<double>(), 0.0);
    }
  }
  return m;
}

struct Report {
  json result;
  bool pass = true;
  std::string text;  // printed instead of the JSON report when set
};

Report cmd_coeff(const RunConfig& c) {
  Report r;
  if (!c.matrix.empty()) {
    const auto j = read_json_arg("@" + c.matrix);
    r.result = c_pm_matrix(matrix_from_json(j.at("b0")), matrix_from_json(j.at("binf")),
                           j.value("alpha", c.alpha));
  } else if (c.b0 || c.binf) {
    r.result = c_pm_continuous({c.alpha, c.b0.value_or(0), c.binf.value_or(0)});
  } else {
    r.result = c_pm_discrete({c.alpha, c.b1, c.bm1});
  }
  return r;
}

Report cmd_spectrum(const RunConfig& c) {
  const auto s = spectrum_of(c);
  Report r;
  r.result = summary_json(s);
  if (c.csv.empty()) {
    r.text = to_csv(s);
  } else {
    write_atomic(c.csv, to_csv(s));
  }
  return r;
}

Report cmd_fit(const RunConfig& c) {
  const auto s = spectrum_of(c);
  auto f = fit_coefficient(s, c.alpha, window_of(c));
  if (const auto p = prediction(c)) attach_prediction(f, *p);
  Report r;
  r.result = to_json(f);
  return r;
}

Report cmd_verify_psido(const RunConfig& c) {
  const AsymContinuous p{c.alpha, c.b0.value_or(1), c.binf.value_or(1)};
  const auto cut = smooth_cutoffs();
  const double shift = std::log(2.0);
  const auto k = tabulated_laplace_kernel(sigma_star(p, cut), -c.grid_l + shift - 0.1,
                                          c.grid_l + shift + 0.1, 1.0 / 512);
  const auto op = discretize_integral(k, LogGrid::make(c.grid_l, c.n));
  const std::size_t depth = std::min<std::size_t>(c.k, 10);
  LanczosOptions lo;
  lo.k = depth;
  lo.seed = c.seed;
  const auto hs = c.n <= 4096 ? dense_eigs(op) : lanczos_extreme(as_linear_map(op), c.n, lo);
  const auto psi = build_psdo(symbol_star(p, cut), c.x_half, c.m);
  const auto ps = lanczos_extreme(psi.linear_map(), c.m, lo);
  const auto table = psido_equivalence(hs, ps, depth);
  Report r;
  r.pass = table.max_rel_diff <= c.tol;
  r.result = to_json(table);
  r.result["aliasing_warning"] = psi.aliasing_warning();
  r.result["pass"] = r.pass;
  return r;
}

Report cmd_verify_laplace(const RunConfig& c) {
  const auto L = lemma_L_check(c.alpha, c.power, 0.5, c.t_large);
  const auto M = lemma_M_check(c.alpha, c.power, 2.0, c.t_small);
  Report r;
  r.pass = L.monotone() && M.monotone() && L.rows.back().deviation <= L.rows.back().bound &&
           M.rows.back().deviation <= M.rows.back().bound;
  r.result = {{"large_t", to_json(L)}, {"small_t", to_json(M)}, {"pass", r.pass}};
  return r;
}

Report cmd_verify_orthogonality(const RunConfig& c) {
  const auto t = orthogonality_check({c.alpha, c.b1, c.bm1}, c.eps, c.n, study_options(c));
  Report r;
  r.pass = t.decreasing();
  r.result = to_json(t);
  r.result["pass"] = r.pass;
  return r;
}

Report cmd_verify_hs(const RunConfig& c) {
  const auto h = hs_identity(discrete_kernel(c), c.n);
  Report r;
  r.pass = h.rel_err <= c.tol;
  r.result = {{"lhs", h.lhs}, {"rhs", h.rhs}, {"rel_err", h.rel_err}, {"pass", r.pass}};
  return r;
}

Report cmd_widom(const RunConfig& c) {
  if (c.n_from < 1 || c.n_to < c.n_from + 2) throw ValidationError("widom: need n_to >= n_from + 2");
  const auto h = discrete_kernel_from_json({{"type", "power"}, {"gamma", c.gamma}});
  const auto s = dense_eigs(build_truncated(h, c.n));
  if (s.lambda_plus.size() < c.n_to)
    throw ResolutionError("widom: only " + std::to_string(s.lambda_plus.size()) +
                          " positive eigenvalues resolved");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  json rows = json::array();
  for (std::size_t n = c.n_from; n <= c.n_to; ++n) {
    const double x = std::sqrt(static_cast<double>(n)), y = -std::log(s.lambda_plus[n - 1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    rows.push_back({{"n", n}, {"lambda", s.lambda_plus[n - 1]}, {"leading", widom_exponent(c.gamma, static_cast<long>(n))}});
  }
  const double cnt = static_cast<double>(c.n_to - c.n_from + 1);
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double target = std::numbers::pi * std::sqrt(2 * c.gamma);
  Report r;
  r.pass = std::abs(slope - target) <= 0.15 * target;
  r.result = {{"slope", slope}, {"target", target}, {"rows", rows}, {"pass", r.pass}};
  return r;
}

Report cmd_study(const RunConfig& c) {
  std::optional<FitWindow> w;
  if (!c.window.empty()) w = window_of(c);
  const auto rep = convergence_study(discrete_kernel(c), c.alpha, c.sizes, w, study_options(c));
  Report r;
  r.pass = rep.interlacing_ok;
  r.result = to_json(rep);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral asymptotics of Hankel operators with log-power kernels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HANKELSPEC_VERSION));
  RunConfig cfg;

  auto params = [&](CLI::App* s) {
    s->add_option("--alpha", cfg.alpha, "Exponent of the logarithm")->check(CLI::PositiveNumber);
    s->add_option("--b1", cfg.b1, "Coefficient at mu = 1");
    s->add_option("--bm1", cfg.bm1, "Coefficient at mu = -1");
  };
  auto continuous = [&](CLI::App* s) {
    s->add_option("--b0", cfg.b0, "Coefficient at lambda = 0");
    s->add_option("--binf", cfg.binf, "Coefficient at lambda = infinity");
  };
  auto kernel = [&](CLI::App* s) {
    s->add_option("--kernel", cfg.kernel, "Kernel description as JSON text or @file");
  };
  auto output = [&](CLI::App* s) { s->add_option("-o,--out", cfg.out, "Report path (default stdout)"); };
  auto size = [&](CLI::App* s) {
    s->add_option("-N,--size", cfg.n, "Truncation size or grid points")->check(CLI::PositiveNumber);
  };

  auto* coeff = app.add_subcommand("coeff", "Asymptotic coefficients c+ and c-");
  params(coeff);
  continuous(coeff);
  coeff->add_option("--matrix", cfg.matrix, "JSON file with Hermitian b0 and binf matrices")
      ->check(CLI::ExistingFile);
  output(coeff);

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of a truncated Hankel operator");
  params(spectrum);
  continuous(spectrum);
  kernel(spectrum);
  spectrum->add_option("-k", cfg.k, "Lanczos depth per sign");
  spectrum->add_option("-L", cfg.grid_l, "Half-width of the logarithmic grid");
  spectrum->add_option("--csv", cfg.csv, "CSV output (default stdout)");
  spectrum->add_option("--summary", cfg.out, "JSON summary path");
  spectrum->add_option("--seed", cfg.seed);

  auto* fit = app.add_subcommand("fit", "Fit c+ and c- from a computed spectrum");
  params(fit);
  continuous(fit);
  kernel(fit);
  fit->add_option("-k", cfg.k, "Lanczos depth per sign");
  fit->add_option("-L", cfg.grid_l, "Half-width of the logarithmic grid");
  fit->add_option("--window", cfg.window, "First and last eigenvalue index")->expected(2);
  fit->add_option("--seed", cfg.seed);
  output(fit);

  auto* vpsi = app.add_subcommand("verify-psido", "Compare the Hankel and pseudo-differential models");
  vpsi->add_option("--alpha", cfg.alpha)->check(CLI::PositiveNumber);
  continuous(vpsi);
  vpsi->add_option("-L", cfg.grid_l, "Half-width of the logarithmic grid");
  vpsi->add_option("-X,--x-half", cfg.x_half, "Half-width of the periodic x grid");
  vpsi->add_option("-M", cfg.m, "Points of the x grid (power of two)");
  vpsi->add_option("-k", cfg.k, "Eigenvalues compared per sign (at most 10)");
  vpsi->add_option("--tol", cfg.tol, "Largest accepted relative difference");
  vpsi->add_option("--seed", cfg.seed);
  output(vpsi);

  auto* vlap = app.add_subcommand("verify-laplace", "Laplace integral asymptotics at both ends");
  vlap->add_option("--alpha", cfg.alpha)->check(CLI::PositiveNumber);
  vlap->add_option("--m", cfg.power, "Power of lambda in the integrand")->check(CLI::NonNegativeNumber);
  vlap->add_option("--t-large", cfg.t_large, "Increasing t values >= 10");
  vlap->add_option("--t-small", cfg.t_small, "Decreasing t values <= 0.1");
  output(vlap);

  auto* vorth = app.add_subcommand("verify-orthogonality", "Counting functions against the orthogonal sum");
  params(vorth);
  vorth->add_option("--eps", cfg.eps, "Thresholds");
  vorth->add_option("-k", cfg.k, "Lanczos depth above the dense limit");
  output(vorth);

  auto* vhs = app.add_subcommand("verify-hs", "Frobenius norm against the sum of squared eigenvalues");
  params(vhs);
  kernel(vhs);
  vhs->add_option("--tol", cfg.tol, "Largest accepted relative error");
  output(vhs);

  auto* widom = app.add_subcommand("widom", "Exponential decay for power-law sequences");
  widom->add_option("--gamma", cfg.gamma, "h(j) = (j+1)^-gamma")->check(CLI::PositiveNumber);
  widom->add_option("--from", cfg.n_from);
  widom->add_option("--to", cfg.n_to);
  output(widom);

  auto* study = app.add_subcommand("study", "Fits across a ladder of truncation sizes");
  params(study);
  kernel(study);
  study->add_option("--sizes", cfg.sizes, "Increasing powers of two");
  study->add_option("--window", cfg.window, "First and last eigenvalue index")->expected(2);
  study->add_option("-k", cfg.k, "Lanczos depth per sign");
  study->add_option("-j,--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  output(study);

  for (auto* s : {spectrum, fit, vpsi, vorth, vhs, widom}) size(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  // -N is shared between subcommands, each with its own default.
  auto* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  auto* size_opt = sub->get_option_no_throw("-N");
  if (!size_opt) cfg.n = 0;
  if (size_opt && size_opt->count() == 0) {
    const std::map<std::string, std::size_t> defaults{{"spectrum", 1024},    {"fit", 4096},
                                                      {"verify-psido", 2048}, {"verify-orthogonality", 4096},
                                                      {"verify-hs", 1024},    {"widom", 512}};
    cfg.n = defaults.at(cfg.command);
  }
  if (cfg.command == "verify-hs" && sub->get_option("--tol")->count() == 0) cfg.tol = 1e-10;

  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  try {
    if (cfg.command == "coeff") rep = cmd_coeff(cfg);
    else if (cfg.command == "spectrum") rep = cmd_spectrum(cfg);
    else if (cfg.command == "fit") rep = cmd_fit(cfg);
    else if (cfg.command == "verify-psido") rep = cmd_verify_psido(cfg);
    else if (cfg.command == "verify-laplace") rep = cmd_verify_laplace(cfg);
    else if (cfg.command == "verify-orthogonality") rep = cmd_verify_orthogonality(cfg);
    else if (cfg.command == "verify-hs") rep = cmd_verify_hs(cfg);
    else if (cfg.command == "widom") rep = cmd_widom(cfg);
    else rep = cmd_study(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON input: " << e.what() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ResolutionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json report{{"version", HANKELSPEC_VERSION},
                    {"config", cfg.to_json()},
                    {"result", rep.result},
                    {"runtime_s", secs}};
  try {
    if (!rep.text.empty()) {
      std::cout << rep.text;
      if (!cfg.out.empty()) write_atomic(cfg.out, report.dump(2) + "\n");
    } else {
      emit(cfg.out, report.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return rep.pass ? kPass : kCheckFailed;
}
