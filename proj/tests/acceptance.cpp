#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"
#include "oracles.hpp"
#include "satscape/cli.hpp"
#include "satscape/errors.hpp"
#include "satscape/hamiltonian.hpp"
#include "satscape/io.hpp"
#include "satscape/landscape.hpp"
#include "satscape/pspin.hpp"
#include "satscape/theory.hpp"

using namespace satscape;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int k, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", k, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// n <= 4, m <= 4, K <= 3.
Formula tiny_formula(std::uint64_t seed) {
  Rng rng(derive_seed(0xacce, seed));
  const auto n = static_cast<std::uint32_t>(2 + rng.below(3));
  const auto K = static_cast<std::uint32_t>(1 + rng.below(3));
  const auto m = 1 + rng.below(4);
  return generate_formula(n, m, K, rng.next());
}

double max_diff(const StateVector& a, const oracle::Vector& b) {
  double m = 0;
  for (std::size_t z = 0; z < a.dimension(); ++z) m = std::max(m, std::abs(a[z] - b(z)));
  return m;
}

struct DenseCheck {
  double measurement_err = 0;
  double energy = 0;
  double h_err = 0;  // relative to the largest entry of the dense product
  bool dense_run = false;
};

DenseCheck check_layout(const QubitLayout& L, const oracle::DenseModel& M, double gamma, std::uint64_t seed) {
  DenseCheck out;
  const auto psi = ground_state(L, gamma);
  const auto p = measurement_distribution(psi);
  const auto ref = oracle::ground_weights(M, gamma);
  for (std::size_t z = 0; z < p.size(); ++z) out.measurement_err = std::max(out.measurement_err, std::abs(p[z] - ref[z]));
  out.energy = total_energy(L, psi, gamma);
  if (L.qubit_count() <= 10) {
    out.dense_run = true;
    const auto r = oracle::random_state(L.qubit_count(), seed);
    const auto rv = oracle::to_eigen(r);
    for (std::uint32_t i = 0; i < L.variable_count(); ++i) {
      const oracle::Vector hd = oracle::h_matrix(M, i, gamma) * rv;
      const double scale = std::max(1.0, hd.cwiseAbs().maxCoeff());
      out.h_err = std::max(out.h_err, max_diff(apply_h_i(L, r, i, gamma), hd) / scale);
    }
  }
  return out;
}

std::pair<VariableSet, BasisElement> drop_one(const QubitLayout& L, std::uint32_t i0, Rng& rng) {
  const auto n = L.variable_count();
  auto S = VariableSet::full(n);
  S.erase(i0);
  auto choice = BasisElement::cat(n);
  if (L.active(i0)) {
    const auto width = L.fiber(i0).size();
    const std::uint64_t pattern = width > 1 ? (rng.below(std::uint64_t{1} << (width - 1)) << 1) : 0;
    choice.factors[i0] = LocalFactor{pattern, pattern == 0 || rng.coin()};
  }
  return {S, choice};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = io::read_file(e.path());
  return out;
}

}  // namespace

int main() {
  const auto start = Clock::now();

  report(1, "measurement oracle on 50 formulas", [] {
    const auto t = Clock::now();
    double worst = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto f = tiny_formula(s);
      const auto L = build_layout(f);
      const auto M = oracle::model_of(f);
      for (double g : {0.25, 0.5, 0.9}) {
        const auto p = measurement_distribution(ground_state(L, g));
        const auto ref = oracle::ground_weights(M, g);
        for (std::size_t z = 0; z < p.size(); ++z) worst = std::max(worst, std::abs(p[z] - ref[z]));
      }
    }
    const double secs = seconds_since(t);
    return Outcome{worst <= 1e-12 && secs <= 10.0, "max error " + fmt(worst) + ", " + fmt(secs) + " s"};
  });

  report(2, "frustration-freeness and dense H_i agreement", [] {
    double energy = 0, herr = 0;
    int dense = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto f = tiny_formula(s);
      const auto L = build_layout(f);
      const auto M = oracle::model_of(f);
      for (double g : {0.25, 0.5, 0.9}) {
        const auto c = check_layout(L, M, g, s);
        energy = std::max(energy, c.energy);
        herr = std::max(herr, c.h_err);
        dense += c.dense_run;
      }
    }
    return Outcome{energy <= 1e-10 && herr <= 1e-12 && dense > 0,
                   "max energy " + fmt(energy) + ", max relative H_i error " + fmt(herr) + " over " +
                       std::to_string(dense) + " dense runs"};
  });

  report(3, "basis-CAT coefficients and the amplitude sandwich", [] {
    double worst = 0;
    std::uint64_t sandwich = 0;
    Rng rng(3);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto f = tiny_formula(100 + s);
      const auto L = build_layout(f);
      const auto i0 = static_cast<std::uint32_t>(s % f.variable_count());
      const auto [S, choice] = drop_one(L, i0, rng);
      const double g = 0.5;
      const auto psi = near_ground_state(L, g, S, choice);
      auto phi = apply_q_gamma(L, psi, g, -1);
      phi.normalize();
      const auto c = expand_in_basis(L, phi);
      for (std::size_t k = 0; k < c.size(); ++k) {
        bool off = false;
        for (auto i : S.indices()) off = off || !factor_is_cat(L, k, i);
        if (off) worst = std::max(worst, std::abs(c[k]));
      }
      sandwich += check_probability_bound(L, g, S, psi, eta_exact(f, 1.0 / f.variable_count())).sandwich_violations;
    }
    return Outcome{worst <= 1e-12 && sandwich == 0,
                   "max off-CAT coefficient " + fmt(worst) + ", sandwich violations " + std::to_string(sandwich)};
  });

  report(4, "probability bound with S = [n] and |S| = n-1", [] {
    std::uint64_t violations = 0, checked = 0;
    double ratio = 0;
    Rng rng(4);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto f = tiny_formula(200 + s);
      const auto L = build_layout(f);
      const auto n = f.variable_count();
      const double g = 0.5;
      const auto full = check_probability_bound(L, g, VariableSet::full(n), ground_state(L, g), 0.0);
      const auto [S, choice] = drop_one(L, static_cast<std::uint32_t>(s % n), rng);
      const auto part = check_probability_bound(L, g, S, near_ground_state(L, g, S, choice), eta_exact(f, 1.0 / n));
      for (const auto* r : {&full, &part}) {
        violations += r->bound_violations + r->sandwich_violations + r->outside_support_nonzero + !r->passed();
        checked += r->checked;
        ratio = std::max(ratio, r->max_ratio);
      }
    }
    return Outcome{violations == 0, std::to_string(violations) + " violations over " + std::to_string(checked) +
                                        " strings, max p/bound " + fmt(ratio)};
  });

  report(5, "landscape oracle equivalence", [] {
    int sat_mismatch = 0, cluster_mismatch = 0, cert_fail = 0, clustered = 0, rejected = 0;
    const std::vector<std::pair<double, double>> gaps{{0.1, 0.3}, {0.15, 0.5}, {0.2, 0.6}, {0.25, 0.75}};
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto n = static_cast<std::uint32_t>(6 + s % 7);
      const auto f = generate_formula(n, static_cast<std::uint64_t>(3.5 * n), 3, derive_seed(5, s));
      const auto r = static_cast<std::uint32_t>(s % 2);
      const auto A = enumerate_sat(f, r);
      if (A.members != oracle::naive_sat(f, r)) ++sat_mismatch;
      for (auto [nu1, nu2] : gaps) {
        const auto th = distance_thresholds(n, nu1, nu2);
        bool ogp = true;
        for (std::size_t a = 0; a < A.size() && ogp; ++a)
          for (std::size_t b = a + 1; b < A.size() && ogp; ++b) {
            const auto d = oracle::hamming(A.members[a], A.members[b]);
            ogp = d <= th.near || d >= th.far;
          }
        if (!ogp) {
          try {
            cluster(A, nu1, nu2);
            ++cert_fail;
          } catch (const OgpViolation&) {
            ++rejected;
          }
          continue;
        }
        ++clustered;
        const auto P = cluster(A, nu1, nu2);
        if (P.clusters != oracle::closure_clusters(A.members, th.near)) ++cluster_mismatch;
        for (std::size_t x = 0; x < P.clusters.size(); ++x)
          for (std::size_t y = 0; y < P.clusters.size(); ++y)
            for (auto u : P.clusters[x])
              for (auto v : P.clusters[y]) {
                const auto d = oracle::hamming(u, v);
                if (x == y ? d > th.near : d < th.far) ++cert_fail;
              }
      }
    }
    return Outcome{sat_mismatch == 0 && cluster_mismatch == 0 && cert_fail == 0 && clustered > 0,
                   std::to_string(sat_mismatch) + " SAT mismatches, " + std::to_string(cluster_mismatch) +
                       " cluster mismatches in " + std::to_string(clustered) + " clusterings, " +
                       std::to_string(cert_fail) + " certificate failures, " + std::to_string(rejected) +
                       " OGP rejections"};
  });

  report(6, "entropy bound at K=3, beta=1, n=24", [] {
    const auto t = Clock::now();
    std::vector<double> rates;
    EnumerationLimits lim;
    lim.workers = 4;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto f = generate_formula(24, 24, 3, derive_seed(6, s));
      const auto A = enumerate_sat(f, 0, std::nullopt, lim);
      rates.push_back(std::log(static_cast<double>(A.size())) / 24.0);
    }
    std::sort(rates.begin(), rates.end());
    const double median = 0.5 * (rates[9] + rates[10]);
    const double bound = theory::sat_count_lower_bound(1.0, 3).value;
    const double secs = seconds_since(t);
    return Outcome{median >= bound - 0.10 && secs <= 120.0,
                   "median " + fmt(median) + " vs bound " + fmt(bound) + ", " + fmt(secs) + " s"};
  });

  report(7, "theory identities and regime scans", [] {
    const double ln2 = std::numbers::ln2;
    double id = 0;
    for (int k = 0; k < 100; ++k) {
      const double a = k / 99.0;
      for (std::uint32_t K : {3u, 8u, 16u, 64u}) id = std::max(id, std::abs(theory::rate_exponent(a, 1.0, K) - ln2 * (1 - a)));
    }
    const auto small = theory::scan_regime(0.75, {2, 3, 4, 5, 6, 7, 8});
    const auto large = theory::scan_regime(0.75, {64});
    const auto feas = large.feasible();
    int inconsistent = 0;
    for (const auto& p : feas) inconsistent += !theory::check_parameter_consistency(p).all();
    bool z2_ok = true;
    for (std::uint32_t K : {8u, 16u})
      for (int k = 0; k <= 200; ++k) {
        const double s = k / 200.0;
        z2_ok = z2_ok && std::abs(theory::z2_exponent(0.75, s, K) - theory::rate_exponent(0.75, s, K)) <=
                             4 * ln2 * 0.75 * std::pow(2.0, -static_cast<double>(K));
      }
    const bool ok = id <= 1e-15 && small.feasible().empty() && !feas.empty() && inconsistent == 0 && z2_ok;
    return Outcome{ok, "identity error " + fmt(id) + ", K<=8 feasible " + std::to_string(small.feasible().size()) +
                           ", K=64 feasible " + std::to_string(feas.size()) + ", z2 bracket " +
                           (z2_ok ? "ok" : "violated")};
  });

  report(8, "depth bound", [] {
    const double v = theory::depth_lower_bound(0.4e6, 1e6, 0.45).value;
    bool monotone = true;
    double prev = -1e300;
    for (int k = 1; k <= 200; ++k) {
      const double x = theory::depth_lower_bound(k * 5e3, 1e6, 0.45).value;
      monotone = monotone && x > prev;
      prev = x;
    }
    return Outcome{std::abs(v - 2.99) <= 1e-2 && monotone, "value " + fmt(v) + (monotone ? ", monotone" : ", not monotone")};
  });

  report(9, "p-spin regularity, quantized single edges, sqrt(d) trend", [] {
    int irregular = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
      for (auto [n, d, p] : {std::tuple{20u, 4u, 2u}, std::tuple{20u, 6u, 4u}, std::tuple{18u, 3u, 3u}}) {
        const auto g = pspin::generate_regular_hypergraph(n, d, p, s);
        const auto deg = g.degrees();
        irregular += !std::all_of(deg.begin(), deg.end(), [d](auto x) { return x == d; });
      }
    double merr = 0, energy = 0, herr = 0;
    for (std::uint32_t p = 2; p <= 4; ++p)
      for (int sign : {+1, -1}) {
        pspin::RegularHypergraph g;
        g.n = p;
        g.d = 1;
        g.p = p;
        g.edges = {{}};
        for (std::uint32_t v = 0; v < p; ++v) g.edges[0].push_back(v);
        const pspin::CouplingVector J{{sign}, 0};
        const auto M = oracle::model_of(pspin::constraint_system(g, J));
        for (double gamma : {0.25, 0.5, 0.9}) {
          const auto c = check_layout(pspin::quantize(g, J, gamma).layout, M, gamma, p);
          merr = std::max(merr, c.measurement_err);
          energy = std::max(energy, c.energy);
          herr = std::max(herr, c.h_err);
        }
      }
    auto median_energy = [](std::uint32_t d) {
      std::vector<double> e;
      for (std::uint64_t s = 0; s < 20; ++s) {
        const auto g = pspin::generate_regular_hypergraph(20, d, 2, derive_seed(9, s));
        const auto J = pspin::generate_couplings(g, derive_seed(90, s));
        e.push_back(static_cast<double>(pspin::ground_state_bruteforce(g, J).energy) / 20.0);
      }
      std::sort(e.begin(), e.end());
      return 0.5 * (e[9] + e[10]);
    };
    const double e4 = median_energy(4), e16 = median_energy(16);
    const double ratio = e16 / e4;
    const bool ok = irregular == 0 && merr <= 1e-12 && energy <= 1e-10 && herr <= 1e-12 && ratio >= 1.5 && ratio <= 2.7;
    return Outcome{ok, std::to_string(irregular) + " irregular graphs, single-edge measurement error " + fmt(merr) +
                          ", energy " + fmt(energy) + ", H_i error " + fmt(herr) + ", e(16)/e(4) = " + fmt(e16) +
                          "/" + fmt(e4) + " = " + fmt(ratio)};
  });

  report(10, "performance", [] {
    const auto f = generate_formula(26, 100, 4, 10);
    EnumerationLimits one;
    auto t = Clock::now();
    const auto A1 = enumerate_sat(f, 0, std::nullopt, one);
    const double t1 = seconds_since(t);
    EnumerationLimits four;
    four.workers = 4;
    t = Clock::now();
    const auto A4 = enumerate_sat(f, 0, std::nullopt, four);
    const double t4 = seconds_since(t);
    const double speedup = t1 / t4;
    Rng rng(10);
    std::vector<std::uint64_t> words;
    while (words.size() < (std::size_t{1} << 17)) words.push_back(rng.next() & ((std::uint64_t{1} << 40) - 1));
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    words.resize(std::size_t{1} << 16);
    const auto H = SolutionSet::from_members(40, words);
    t = Clock::now();
    const auto hist = overlap_histogram(H);
    const double th = seconds_since(t);
    const bool ok = t1 <= 60.0 && A1.members == A4.members && speedup >= 3.0 && th <= 30.0 &&
                    hist.total_pairs() == (std::uint64_t{1} << 15) * ((std::uint64_t{1} << 16) - 1);
    return Outcome{ok, "enumeration " + fmt(t1) + " s single, " + fmt(t4) + " s with 4 workers (speedup " +
                           fmt(speedup) + "x, " + std::to_string(std::thread::hardware_concurrency()) +
                           " hardware threads), histogram on 2^16 members " + fmt(th) + " s"};
  });

  report(11, "CLI determinism", [] {
    const auto root = fs::temp_directory_path() / "satscape_acceptance_cli";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> runs{
        {"--seed", "5", "--instances", "3", "gen", "--n", "20", "--K", "3", "--alpha", "0.6"},
        {"--seed", "5", "--instances", "2", "--workers", "2", "enumerate", "--n", "14", "--K", "3", "--m", "30",
         "--histogram"},
        {"--seed", "5", "ogp", "--n", "12", "--K", "3", "--m", "20", "--nu1", "0.1", "--nu2", "0.3"},
        {"--seed", "5", "cluster", "--n", "12", "--K", "3", "--m", "40", "--nu1", "0.1", "--nu2", "0.3"},
        {"--seed", "5", "hamiltonian", "--n", "3", "--K", "2", "--m", "4", "--exclude", "0", "--dump-state"},
        {"--seed", "5", "--instances", "2", "pspin", "--n", "6", "--d", "2", "--p", "2", "--slack", "2", "--gamma",
         "0.5"},
        {"theory-scan", "--alpha", "0.75", "--K", "16,64"},
        {"depth-bound", "--d", "4e5", "--n-bits", "1e6"}};
    int differing = 0, failed = 0;
    std::string first_diff;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto dir = root / std::to_string(k);
      std::vector<std::string> args{"--out", dir.string()};
      args.insert(args.end(), runs[k].begin(), runs[k].end());
      std::ostringstream out, err;
      std::map<std::string, std::string> snaps[2];
      for (int rep = 0; rep < 2; ++rep) {
        fs::remove_all(dir);
        if (cli::run(args, out, err) != 0) ++failed;
        snaps[rep] = snapshot(dir);
      }
      for (auto& s : snaps) {
        auto m = nlohmann::json::parse(s.at("manifest.json"));
        m.erase("wall_time_seconds");
        s["manifest.json"] = m.dump();
      }
      if (snaps[0] != snaps[1]) {
        ++differing;
        if (first_diff.empty()) first_diff = "run " + std::to_string(k);
      }
    }
    fs::remove_all(root);
    return Outcome{differing == 0 && failed == 0, std::to_string(runs.size()) + " subcommand runs, " +
                                                      std::to_string(differing) + " differing, " +
                                                      std::to_string(failed) + " failed" +
                                                      (first_diff.empty() ? "" : " (" + first_diff + ")")};
  });

  std::printf("%d of 11 criteria failed, %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
