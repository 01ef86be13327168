#include "satscape/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "satscape/errors.hpp"
#include "satscape/io.hpp"
#include "satscape/parallel.hpp"

namespace satscape::theory {
namespace {

constexpr double kLn2 = std::numbers::ln2;

double pow2(double e) { return std::exp2(e); }

void check_width(std::uint32_t K) {
  if (K == 0 || K > 1000) throw ParameterError("K must lie in [1, 1000]");
}

// Inclusive grid lo, lo+step, ..., hi.
std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::int64_t k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (out.empty() || out.back() < hi - 1e-12) out.push_back(hi);
  return out;
}

}  // namespace

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

double rate_exponent(double alpha, double s, std::uint32_t K) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("rate_exponent needs s in [0, 1]");
  check_width(K);
  // Grouped so that s = 1 gives ln2 (1 - alpha) exactly.
  return kLn2 * (1.0 - alpha) + binary_entropy(s) - kLn2 * alpha * (1.0 - std::pow(s, K));
}

double sat_density_limit(std::uint32_t K) {
  check_width(K);
  return pow2(K) * kLn2 - ((K + 1) * kLn2 + 3.0) / 2.0;
}

RegimeValue sat_count_lower_bound(double beta, std::uint32_t K) {
  check_width(K);
  if (!(beta >= 0.0)) throw DomainError("density must be nonnegative");
  const double a = pow2(-static_cast<double>(K));
  const double inner = 1.0 - 2.0 * a + a * a - K * a * (1.0 - a) * (2.0 * a + 3.0 * K * a * a);
  if (!(inner > 0.0)) throw DomainError("sat_count_lower_bound: logarithm argument not positive");
  RegimeValue v;
  v.value = kLn2 + 0.5 * beta * std::log(inner);
  v.in_regime = K >= 3 && beta < sat_density_limit(K);
  return v;
}

double z2_exponent(double alpha, double s, std::uint32_t K) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("z2_exponent needs s in [0, 1]");
  check_width(K);
  const double a = pow2(-static_cast<double>(K));
  const double inner = 2.0 * a - a * std::pow(s, K);
  if (!(inner < 1.0)) throw DomainError("z2_exponent: logarithm argument not positive");
  return kLn2 + binary_entropy(s) + alpha * pow2(K) * kLn2 * std::log1p(-inner);
}

RegimeValue azuma_tail(double eta, double eps, std::uint32_t K) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("azuma_tail needs eps in [0, 1)");
  check_width(K);
  // 1 - (1 - eps)^K without cancellation
  const double loss = pow2(K) * -std::expm1(K * std::log1p(-eps));
  const double entropy = eps == 0.0 ? 0.0 : eps * (1.0 - std::log(eps));
  const double gap = eta - loss;
  RegimeValue v;
  v.value = entropy - gap * gap / pow2(K + 1.0);
  v.in_regime = gap > 0.0;
  return v;
}

DepthBound depth_lower_bound(double d, double n_bits, double mu, LogBase base) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("depth_lower_bound needs mu in (0, 1)");
  if (!(d >= 0.0)) throw DomainError("depth_lower_bound needs d >= 0");
  if (!(n_bits >= 1.0)) throw DomainError("depth_lower_bound needs n_bits >= 1");
  const double arg = d * d / (400.0 * n_bits * std::log(1.0 / mu));
  DepthBound b;
  b.base = base;
  b.vacuous = arg <= 1.0;
  const double l = base == LogBase::two ? std::log2(arg) : std::log(arg);
  b.value = l / 3.0;
  return b;
}

double g0(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw DomainError("g0 needs eps in [0, 1/2]");
  if (eps == 0.0) return 0.0;
  return 2.0 * eps * (1.0 - std::log(2.0 * eps));
}

double RegimeParams::c1() const { return 0.5 * kLn2 * (1.0 - alpha) + 2.0 * delta; }
double RegimeParams::c2() const { return kLn2 * (1.0 - alpha) - delta; }
double RegimeParams::delta_max() const { return kLn2 * (1.0 - alpha) / 7.0; }

ConsistencyReport check_parameter_consistency(const RegimeParams& p) {
  ConsistencyReport r;
  r.c1 = p.c1();
  r.c2 = p.c2();
  const double log_gamma = std::log(p.gamma);
  const double log_eighth = -3.0 * kLn2;
  const double Keta = static_cast<double>(p.K) * p.eta;
  r.gamma_lambda_margin = log_eighth - 2.0 * p.lambda * log_gamma;
  r.gamma_lambda = r.gamma_lambda_margin > 0.0;
  r.eta_gap_margin = 0.5 * (r.c2 - r.c1) * kLn2 - 4.0 * Keta * (kLn2 - log_gamma);
  r.eta_gap = r.eta_gap_margin >= 0.0;
  r.gamma_lambda_eta_margin = log_eighth - (2.0 * p.lambda - 3.0 * Keta) * log_gamma;
  r.gamma_lambda_eta = r.gamma_lambda_eta_margin > 0.0;
  r.eta_small_margin = 1.0 - 4.0 * Keta;
  r.eta_small = r.eta_small_margin > 0.0;
  r.delta_ok = p.delta > 0.0 && p.delta <= p.delta_max() * (1.0 + 1e-12);
  r.c_order = 0.0 < r.c1 && r.c1 < r.c2;
  return r;
}

double grid_sup(double alpha, std::uint32_t K, double lo, double hi, double step) {
  double best = -std::numeric_limits<double>::infinity();
  for (double s : grid(lo, hi, step)) best = std::max(best, rate_exponent(alpha, std::clamp(s, 0.0, 1.0), K));
  return best;
}

std::vector<RegimeParams> ScanResult::feasible() const {
  std::vector<RegimeParams> out;
  for (const auto& p : points)
    if (p.feasible()) out.push_back(p.params);
  return out;
}

ScanResult scan_regime(double alpha, const std::vector<std::uint32_t>& Ks, const ScanGrids& grids,
                       std::size_t workers) {
  if (!(alpha > 0.7 && alpha < 1.0)) throw ParameterError("scan_regime needs alpha in (0.7, 1)");
  if (!(grids.nu_step > 0.0 && grids.s_step > 0.0)) throw ParameterError("grid steps must be positive");
  for (auto K : Ks) check_width(K);
  ScanResult res;
  res.alpha = alpha;
  res.Ks = Ks;

  const auto steps = static_cast<std::int64_t>(std::floor(0.5 / grids.nu_step + 1e-9));
  for (auto K : Ks)
    for (std::int64_t a = 1; a <= steps; ++a)
      for (std::int64_t b = a + 1; b <= steps; ++b) {
        RateWindow w;
        w.K = K;
        w.nu1 = static_cast<double>(a) * grids.nu_step;
        w.nu2 = static_cast<double>(b) * grids.nu_step;
        w.order_ok = w.nu1 < w.nu2 / 2.0 && w.nu2 < 0.5;
        res.windows.push_back(w);
      }
  parallel_for(res.windows.size(), workers, [&](std::size_t k) {
    auto& w = res.windows[k];
    w.sup_near = grid_sup(alpha, w.K, 1.0 - w.nu1, 1.0, grids.s_step);
    w.sup_window = grid_sup(alpha, w.K, 1.0 - w.nu2, 1.0 - w.nu1, grids.s_step);
    w.window_ok = w.sup_window <= -kLn2 / 20.0;
  });

  for (const auto& w : res.windows) {
    if (!w.window_ok || !w.order_ok) continue;
    for (double df : grids.delta_fraction)
      for (double eta : grids.eta)
        for (double gamma : grids.gamma)
          for (double lambda : grids.lambda)
            for (double eps : grids.eps) {
              ScanPoint pt;
              auto& p = pt.params;
              p.alpha = alpha;
              p.K = w.K;
              p.nu1 = w.nu1;
              p.nu2 = w.nu2;
              p.eta = eta;
              p.gamma = gamma;
              p.lambda = lambda;
              p.eps = eps;
              p.delta = df * p.delta_max();
              pt.sup_near = w.sup_near;
              pt.sup_window = w.sup_window;
              pt.near_ok = w.sup_near <= kLn2 * (1.0 - alpha) + p.delta / 2.0;
              pt.azuma = azuma_tail(eta, eps, w.K);
              pt.consistency = check_parameter_consistency(p);
              res.points.push_back(pt);
            }
  }
  return res;
}

std::string scan_csv(const ScanResult& r) {
  using io::format_double;
  std::ostringstream os;
  os << "# satscape.theory_scan v1\n"
        "alpha,K,nu1,nu2,eps,lambda,gamma,eta,delta,c1,c2,sup_near,sup_window,sup_window_bits,"
        "near_ok,azuma,azuma_in_regime,gamma_lambda,eta_gap,gamma_lambda_eta,eta_small,delta_ok,"
        "c_order,feasible\n";
  for (const auto& pt : r.points) {
    const auto& p = pt.params;
    const auto& c = pt.consistency;
    os << format_double(p.alpha) << ',' << p.K << ',' << format_double(p.nu1) << ','
       << format_double(p.nu2) << ',' << format_double(p.eps) << ',' << format_double(p.lambda)
       << ',' << format_double(p.gamma) << ',' << format_double(p.eta) << ','
       << format_double(p.delta) << ',' << format_double(c.c1) << ',' << format_double(c.c2)
       << ',' << format_double(pt.sup_near) << ',' << format_double(pt.sup_window) << ','
       << format_double(pt.sup_window / kLn2) << ',' << pt.near_ok << ','
       << format_double(pt.azuma.value) << ',' << pt.azuma.in_regime << ',' << c.gamma_lambda
       << ',' << c.eta_gap << ',' << c.gamma_lambda_eta << ',' << c.eta_small << ','
       << c.delta_ok << ',' << c.c_order << ',' << pt.feasible() << '\n';
  }
  return os.str();
}

std::string windows_csv(const ScanResult& r) {
  using io::format_double;
  std::ostringstream os;
  os << "# satscape.rate_windows v1\nalpha,K,nu1,nu2,sup_near,sup_window,sup_window_bits,window_ok,order_ok\n";
  for (const auto& w : r.windows)
    os << format_double(r.alpha) << ',' << w.K << ',' << format_double(w.nu1) << ','
       << format_double(w.nu2) << ',' << format_double(w.sup_near) << ','
       << format_double(w.sup_window) << ',' << format_double(w.sup_window / kLn2) << ','
       << w.window_ok << ',' << w.order_ok << '\n';
  return os.str();
}

nlohmann::json scan_summary(const ScanResult& r) {
  nlohmann::json per_k = nlohmann::json::array();
  for (auto K : r.Ks) {
    std::size_t count = 0;
    double nu1_lo = 1, nu1_hi = 0, nu2_lo = 1, nu2_hi = 0;
    for (const auto& pt : r.points) {
      if (pt.params.K != K || !pt.feasible()) continue;
      ++count;
      nu1_lo = std::min(nu1_lo, pt.params.nu1);
      nu1_hi = std::max(nu1_hi, pt.params.nu1);
      nu2_lo = std::min(nu2_lo, pt.params.nu2);
      nu2_hi = std::max(nu2_hi, pt.params.nu2);
    }
    nlohmann::json k{{"K", K}, {"feasible", count}};
    if (count) {
      k["nu1_range"] = {nu1_lo, nu1_hi};
      k["nu2_range"] = {nu2_lo, nu2_hi};
    }
    per_k.push_back(k);
  }
  return {{"alpha", r.alpha},
          {"windows", r.windows.size()},
          {"points", r.points.size()},
          {"feasible", r.feasible().size()},
          {"per_K", per_k},
          {"units", "nats (sup_window_bits in bits)"}};
}

}  // namespace satscape::theory
