#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace satscape::theory {

// All exponents are in nats.

/// H(x) = -x ln x - (1-x) ln(1-x), with H(0) = H(1) = 0.
double binary_entropy(double x);

/// C(alpha, s, K) = ln2 + H(s) - 2 ln2 alpha + ln2 alpha s^K.
double rate_exponent(double alpha, double s, std::uint32_t K);

/// A value that is only meaningful inside a hypothesis; `in_regime` reports it.
struct RegimeValue {
  double value = 0;
  bool in_regime = false;
};

/// Largest clause density beta = m/n covered by the satisfiable-count bound.
double sat_density_limit(std::uint32_t K);

/// Lower bound on (1/n) ln |SAT| at density beta; in regime for K >= 3 and
/// beta < sat_density_limit(K).
RegimeValue sat_count_lower_bound(double beta, std::uint32_t K);

/// ln2 + H(s) + alpha 2^K ln2 ln(1 - 2^(1-K) + 2^-K s^K).
double z2_exponent(double alpha, double s, std::uint32_t K);

/// Per-variable log of the union bound eps ln(e/eps) - (eta - 2^K(1-(1-eps)^K))^2 / 2^(K+1);
/// in regime when eta exceeds the expected coverage loss 2^K(1-(1-eps)^K).
RegimeValue azuma_tail(double eta, double eps, std::uint32_t K);

enum class LogBase { two, natural };

struct DepthBound {
  double value = 0;
  /// The logarithm's argument is at most 1, so no depth is excluded.
  bool vacuous = false;
  LogBase base = LogBase::two;
};

/// (1/3) log(d^2 / (400 n ln(1/mu))); inner log natural, outer per `base`.
DepthBound depth_lower_bound(double d, double n_bits, double mu, LogBase base = LogBase::two);

/// g0(eps) = 2 eps ln(e / (2 eps)).
double g0(double eps);

struct RegimeParams {
  double alpha = 0;
  std::uint32_t K = 0;
  double eps = 0;
  double lambda = 0;
  double gamma = 0;
  double eta = 0;
  double nu1 = 0;
  double nu2 = 0;
  double delta = 0;

  double c1() const;
  double c2() const;
  /// (1/7) ln2 (1 - alpha)
  double delta_max() const;
};

/// Each flag with its margin (log domain; positive margin = satisfied).
struct ConsistencyReport {
  double c1 = 0;
  double c2 = 0;
  bool gamma_lambda = false;      // gamma^(2 lambda) < 1/8
  bool eta_gap = false;           // (2/gamma)^(4 K eta) <= 2^((c2 - c1)/2)
  bool gamma_lambda_eta = false;  // gamma^(2 lambda - 3 K eta) < 1/8
  bool eta_small = false;         // 4 K eta < 1
  bool delta_ok = false;          // 0 < delta <= (1/7) ln2 (1 - alpha)
  bool c_order = false;           // 0 < c1 < c2
  double gamma_lambda_margin = 0;
  double eta_gap_margin = 0;
  double gamma_lambda_eta_margin = 0;
  double eta_small_margin = 0;

  bool all() const noexcept {
    return gamma_lambda && eta_gap && gamma_lambda_eta && eta_small && delta_ok && c_order;
  }
};

ConsistencyReport check_parameter_consistency(const RegimeParams& p);

struct ScanGrids {
  std::vector<double> eta{1e-7, 1e-6, 1e-5};
  std::vector<double> gamma{1e-2, 1e-5, 1e-10, 1e-20};
  std::vector<double> lambda{0.05, 0.1, 0.2};
  /// Multiples of delta_max.
  std::vector<double> delta_fraction{0.25, 0.5, 1.0};
  std::vector<double> eps{1e-45, 1e-40, 1e-35};
  double nu_step = 0.01;
  double s_step = 0.005;
};

/// Grid maxima of C over the two overlap windows for one (K, nu1, nu2).
struct RateWindow {
  std::uint32_t K = 0;
  double nu1 = 0;
  double nu2 = 0;
  double sup_near = 0;    // s in [1 - nu1, 1]
  double sup_window = 0;  // s in [1 - nu2, 1 - nu1]
  bool window_ok = false; // sup_window <= -ln2 / 20
  bool order_ok = false;  // nu1 < nu2 / 2 and nu2 < 1/2
};

struct ScanPoint {
  RegimeParams params;
  double sup_near = 0;
  double sup_window = 0;
  bool near_ok = false;  // sup_near <= ln2 (1 - alpha) + delta / 2
  RegimeValue azuma;
  ConsistencyReport consistency;

  bool feasible() const noexcept {
    return near_ok && azuma.in_regime && azuma.value < 0 && consistency.all();
  }
};

struct ScanResult {
  double alpha = 0;
  std::vector<std::uint32_t> Ks;
  std::vector<RateWindow> windows;
  /// Inner-grid points for every window with window_ok and order_ok.
  std::vector<ScanPoint> points;

  std::vector<RegimeParams> feasible() const;
};

/// Maximum of rate_exponent on an inclusive s-grid over [lo, hi].
double grid_sup(double alpha, std::uint32_t K, double lo, double hi, double step);

/// Requires alpha in (0.7, 1).
ScanResult scan_regime(double alpha, const std::vector<std::uint32_t>& Ks,
                       const ScanGrids& grids = {}, std::size_t workers = 1);

std::string scan_csv(const ScanResult& r);
std::string windows_csv(const ScanResult& r);
nlohmann::json scan_summary(const ScanResult& r);

}  // namespace satscape::theory
