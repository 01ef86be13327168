#include "satscape/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "satscape/errors.hpp"
#include "satscape/hamiltonian.hpp"
#include "satscape/hamiltonian_io.hpp"
#include "satscape/io.hpp"
#include "satscape/ksat_io.hpp"
#include "satscape/landscape_io.hpp"
#include "satscape/parallel.hpp"
#include "satscape/pspin.hpp"
#include "satscape/rng.hpp"
#include "satscape/theory.hpp"

namespace satscape::cli {
namespace {

using nlohmann::json;

struct Common {
  std::string out = "satscape_out";
  std::uint64_t seed = 1;
  std::uint32_t instances = 1;
  std::size_t workers = 1;
  std::uint32_t enum_cap = 30;
  std::uint32_t qubit_cap = 20;
  std::size_t pair_cap = std::size_t{1} << 20;
  std::uint64_t eta_budget = kDefaultEtaBudget;
};

struct FormulaSource {
  std::string input;
  std::uint32_t n = 0;
  std::uint32_t K = 3;
  std::optional<std::uint64_t> m;
  std::optional<double> alpha;
};

struct Analysis {
  std::uint32_t r = 0;
  std::optional<double> eps;
  double nu1 = 0;
  double nu2 = 0;
  double c1 = 0;
  double c2 = 0;
  bool histogram = false;
};

struct HamiltonianOpts {
  double gamma = 0.5;
  std::vector<std::uint32_t> exclude;
  bool dump_state = true;
};

struct PspinOpts {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t p = 2;
  std::optional<std::int64_t> slack;
  std::optional<double> gamma;
  std::uint64_t max_retries = 1'000'000;
};

struct ScanOpts {
  double alpha = 0.75;
  std::vector<std::uint32_t> Ks{8, 16, 32, 64};
  double nu_step = 0.01;
  double s_step = 0.005;
};

struct DepthOpts {
  std::optional<double> d;
  std::optional<double> nu2;
  double n_bits = 0;
  double mu = 0.45;
  std::string base = "2";
};

/// Files are collected in memory and written by one writer, in order.
class Outputs {
 public:
  void add(std::string name, std::string bytes) { files_.emplace_back(std::move(name), std::move(bytes)); }
  void add_json(std::string name, const json& j) { add(std::move(name), j.dump(2) + "\n"); }

  json write_all(const std::filesystem::path& dir) const {
    json listing = json::array();
    for (const auto& [name, bytes] : files_) {
      io::write_file(dir / name, bytes);
      listing.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a64", io::hex64(io::fnv1a64(bytes))}});
    }
    return listing;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
  return os.str();
}

std::uint32_t instance_count(const Common& c, const FormulaSource& src) {
  return src.input.empty() ? c.instances : 1;
}

Formula resolve_formula(const Common& c, const FormulaSource& src, std::size_t i) {
  if (!src.input.empty()) return read_formula(src.input);
  if (src.n == 0) throw ParameterError("give --input or --n");
  if (src.m && src.alpha) throw ParameterError("--m and --alpha are exclusive");
  std::uint64_t m = 0;
  if (src.m)
    m = *src.m;
  else if (src.alpha)
    m = DensityParams{*src.alpha, src.K, src.n}.clause_count();
  else
    throw ParameterError("give --m or --alpha");
  return generate_formula(src.n, m, src.K, derive_seed(c.seed, i));
}

EnumerationLimits limits_of(const Common& c, std::size_t workers) {
  EnumerationLimits L;
  L.max_variables = c.enum_cap;
  L.max_pair_set = c.pair_cap;
  L.workers = workers;
  return L;
}

SolutionSet solutions_of(const Formula& f, const Analysis& a, const EnumerationLimits& L) {
  return a.eps ? enumerate_sat_eps(f, *a.eps, a.r, L) : enumerate_sat(f, a.r, std::nullopt, L);
}

// Fans instances out over the worker pool; each returns its own files and
// summary, merged afterwards in index order.
struct InstanceResult {
  std::vector<std::pair<std::string, std::string>> files;
  json summary;
};

template <class Body>
std::vector<InstanceResult> for_instances(std::size_t count, std::size_t workers, Body&& body) {
  std::vector<InstanceResult> res(count);
  const std::size_t inner = count > 1 ? 1 : workers;
  parallel_for(count, count > 1 ? workers : 1, [&](std::size_t i) { res[i] = body(i, inner); });
  return res;
}

json merge(Outputs& out, std::vector<InstanceResult>& res) {
  json all = json::array();
  for (auto& r : res) {
    for (auto& [name, bytes] : r.files) out.add(name, std::move(bytes));
    all.push_back(std::move(r.summary));
  }
  return all;
}

json cmd_gen(const Common& c, const FormulaSource& src, Outputs& out) {
  if (!src.input.empty()) throw ParameterError("gen does not read --input");
  auto res = for_instances(c.instances, c.workers, [&](std::size_t i, std::size_t) {
    const auto f = resolve_formula(c, src, i);
    InstanceResult r;
    const auto stem = numbered("instance", i, "");
    r.files.emplace_back(stem + ".cnf", to_dimacs(f));
    const auto side = formula_sidecar(f, src.alpha);
    r.files.emplace_back(stem + ".json", side.dump(2) + "\n");
    r.summary = side;
    return r;
  });
  return merge(out, res);
}

json cmd_enumerate(const Common& c, const FormulaSource& src, const Analysis& a, Outputs& out) {
  auto res = for_instances(instance_count(c, src), c.workers, [&](std::size_t i, std::size_t w) {
    const auto f = resolve_formula(c, src, i);
    const auto L = limits_of(c, w);
    const auto A = solutions_of(f, a, L);
    InstanceResult r;
    r.files.emplace_back(numbered("solutions", i, ".csv"), solutions_csv(A));
    r.summary = solution_summary(A);
    r.summary["instance"] = i;
    r.summary["seed"] = f.seed();
    if (a.eps) r.summary["eps"] = *a.eps;
    if (a.histogram) r.files.emplace_back(numbered("histogram", i, ".csv"), histogram_csv(overlap_histogram(A, L)));
    return r;
  });
  return merge(out, res);
}

json cmd_ogp(const Common& c, const FormulaSource& src, const Analysis& a, Outputs& out) {
  auto res = for_instances(instance_count(c, src), c.workers, [&](std::size_t i, std::size_t w) {
    const auto f = resolve_formula(c, src, i);
    const auto L = limits_of(c, w);
    const auto A = solutions_of(f, a, L);
    InstanceResult r;
    r.files.emplace_back(numbered("histogram", i, ".csv"), histogram_csv(overlap_histogram(A, L)));
    r.summary = ogp_summary(detect_ogp(A, a.nu1, a.nu2, L), f.variable_count(), a.nu1, a.nu2);
    r.summary["instance"] = i;
    r.summary["seed"] = f.seed();
    r.summary["solutions"] = A.size();
    return r;
  });
  return merge(out, res);
}

json cmd_cluster(const Common& c, const FormulaSource& src, const Analysis& a, Outputs& out) {
  auto res = for_instances(instance_count(c, src), c.workers, [&](std::size_t i, std::size_t w) {
    const auto f = resolve_formula(c, src, i);
    const auto L = limits_of(c, w);
    const auto A = solutions_of(f, a, L);
    InstanceResult r;
    try {
      const auto P = cluster(A, a.nu1, a.nu2, L);
      r.files.emplace_back(numbered("clusters", i, ".csv"), clusters_csv(P));
      r.summary = cluster_summary(P, cluster_stats(P, a.c1, a.c2));
      r.summary["ogp"] = true;
    } catch (const OgpViolation& v) {
      r.summary = {{"ogp", false},
                   {"witness", {bits_to_string(v.witness().first, f.variable_count()),
                                bits_to_string(v.witness().second, f.variable_count())}},
                   {"witness_distance", v.distance()}};
    }
    r.summary["instance"] = i;
    r.summary["seed"] = f.seed();
    return r;
  });
  return merge(out, res);
}

json cmd_hamiltonian(const Common& c, const FormulaSource& src, const HamiltonianOpts& h, Outputs& out) {
  auto res = for_instances(instance_count(c, src), c.workers, [&](std::size_t i, std::size_t) {
    const auto f = resolve_formula(c, src, i);
    const auto layout = build_layout(f, HamiltonianLimits{c.qubit_cap});
    const auto n = f.variable_count();
    auto S = VariableSet::full(n);
    for (auto v : h.exclude) {
      if (v >= n) throw ParameterError("--exclude variable out of range");
      S.erase(v);
    }
    auto choice = BasisElement::cat(n);
    for (auto v : h.exclude)
      if (layout.active(v)) choice.factors[v] = LocalFactor{0, true};
    const auto psi = near_ground_state(layout, h.gamma, S, choice);
    const auto excluded = n - S.size();
    const double eta = excluded == 0 ? 0.0 : eta_exact_excluding(f, excluded, c.eta_budget);
    const auto bound = check_probability_bound(layout, h.gamma, S, psi, eta);
    InstanceResult r;
    std::vector<double> local(n);
    for (std::uint32_t v = 0; v < n; ++v) local[v] = local_energy(layout, psi, v, h.gamma);
    r.files.emplace_back(numbered("measurement", i, ".csv"), measurement_csv(layout, measurement_distribution(psi)));
    if (h.dump_state) {
      const auto stem = numbered("state", i, "");
      r.files.emplace_back(stem + ".bin", state_bytes(psi));
      r.files.emplace_back(stem + ".json", state_header(layout, h.gamma).dump(2) + "\n");
    }
    json report{{"instance", i},
                {"seed", f.seed()},
                {"gamma", h.gamma},
                {"S", S.indices()},
                {"layout", layout_summary(layout)},
                {"local_energies", local},
                {"total_energy", std::accumulate(local.begin(), local.end(), 0.0)},
                {"probability_bound", bound_summary(bound)}};
    r.files.emplace_back(numbered("hamiltonian", i, ".json"), report.dump(2) + "\n");
    r.summary = {{"instance", i},
                 {"qubits", layout.qubit_count()},
                 {"total_energy", report["total_energy"]},
                 {"bound_passed", bound.passed()}};
    return r;
  });
  return merge(out, res);
}

json cmd_pspin(const Common& c, const PspinOpts& o, Outputs& out) {
  std::vector<pspin::RegularHypergraph> graphs(c.instances);
  auto res = for_instances(c.instances, c.workers, [&](std::size_t i, std::size_t w) {
    pspin::SpinLimits L;
    L.max_spins = c.enum_cap;
    L.max_retries = o.max_retries;
    L.workers = w;
    const auto s = derive_seed(c.seed, i);
    graphs[i] = pspin::generate_regular_hypergraph(o.n, o.d, o.p, s, L);
    const auto& g = graphs[i];
    const auto J = pspin::generate_couplings(g, derive_seed(s, 1));
    const auto ground = pspin::ground_state_bruteforce(g, J, L);
    InstanceResult r;
    r.files.emplace_back(numbered("hypergraph", i, ".json"), pspin::hypergraph_json(g, J).dump(2) + "\n");
    r.summary = {{"instance", i},
                 {"seed", s},
                 {"edges", g.edge_count()},
                 {"ground_energy", ground.energy},
                 {"per_spin", static_cast<double>(ground.energy) / g.n},
                 {"ground_state", bits_to_string(ground.code, g.n)}};
    if (o.slack) {
      const auto A = pspin::near_ground_set(g, J, *o.slack, L);
      EnumerationLimits EL = limits_of(c, w);
      r.files.emplace_back(numbered("near_ground", i, ".csv"), solutions_csv(A));
      r.files.emplace_back(numbered("histogram", i, ".csv"), histogram_csv(overlap_histogram(A, EL)));
      r.summary["near_ground_size"] = A.size();
    }
    if (o.gamma) {
      const auto q = pspin::quantize(g, J, *o.gamma, HamiltonianLimits{c.qubit_cap});
      const auto psi = q.ground_state();
      r.files.emplace_back(numbered("measurement", i, ".csv"),
                           measurement_csv(q.layout, measurement_distribution(psi)));
      r.summary["quantized_energy"] = total_energy(q.layout, psi, q.gamma);
    }
    return r;
  });
  std::vector<pspin::EnergyRow> rows;
  for (std::size_t i = 0; i < res.size(); ++i) {
    pspin::GroundState gs;
    gs.energy = res[i].summary["ground_energy"].get<std::int64_t>();
    gs.code = Assignment::from_string(res[i].summary["ground_state"].get<std::string>()).word();
    rows.push_back({res[i].summary["seed"].get<std::uint64_t>(), &graphs[i], gs});
  }
  out.add("energies.csv", pspin::energies_csv(rows));
  return merge(out, res);
}

json cmd_theory_scan(const Common& c, const ScanOpts& o, Outputs& out) {
  theory::ScanGrids grids;
  grids.nu_step = o.nu_step;
  grids.s_step = o.s_step;
  const auto res = theory::scan_regime(o.alpha, o.Ks, grids, c.workers);
  for (const auto& p : res.feasible())
    if (!theory::check_parameter_consistency(p).all())
      throw ContractError("scan returned a tuple failing the consistency check");
  out.add("theory_scan.csv", theory::scan_csv(res));
  out.add("rate_windows.csv", theory::windows_csv(res));
  const auto summary = theory::scan_summary(res);
  out.add_json("theory_scan.json", summary);
  return summary;
}

json cmd_depth(const DepthOpts& o, Outputs& out) {
  if (o.d.has_value() == o.nu2.has_value()) throw ParameterError("give exactly one of --d and --nu2");
  if (o.base != "2" && o.base != "e") throw ParameterError("--log-base must be 2 or e");
  const double d = o.d ? *o.d : *o.nu2 * o.n_bits;
  const auto base = o.base == "2" ? theory::LogBase::two : theory::LogBase::natural;
  const auto b = theory::depth_lower_bound(d, o.n_bits, o.mu, base);
  json j{{"d", d},
         {"n_bits", o.n_bits},
         {"mu", o.mu},
         {"log_base", o.base},
         {"inner_log", "natural"},
         {"depth_lower_bound", b.value},
         {"vacuous", b.vacuous}};
  std::ostringstream csv;
  csv << "# satscape.depth_bound v1\nd,n_bits,mu,log_base,depth_lower_bound,vacuous\n"
      << io::format_double(d) << ',' << io::format_double(o.n_bits) << ',' << io::format_double(o.mu)
      << ',' << o.base << ',' << io::format_double(b.value) << ',' << b.vacuous << '\n';
  out.add("depth_bound.csv", csv.str());
  out.add_json("depth_bound.json", j);
  return j;
}

void add_source(CLI::App* sub, FormulaSource& src) {
  sub->add_option("--input", src.input, "DIMACS file (sidecar .json read if present)");
  sub->add_option("--n", src.n, "Variables");
  sub->add_option("--K", src.K, "Clause width")->capture_default_str();
  sub->add_option("--m", src.m, "Clause count");
  sub->add_option("--alpha", src.alpha, "Density: m = round(alpha 2^K ln2 n)");
}

void add_analysis(CLI::App* sub, Analysis& a, bool thresholds) {
  sub->add_option("--r", a.r, "Allowed violated clauses")->capture_default_str();
  sub->add_option("--eps", a.eps, "Union over subsets with ceil(eps n) excluded variables");
  if (thresholds) {
    sub->add_option("--nu1", a.nu1, "Near threshold (fraction of n)")->required();
    sub->add_option("--nu2", a.nu2, "Far threshold (fraction of n)")->required();
  }
}

json error_record(const std::string& kind, const std::string& message, int code) {
  return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random K-SAT landscapes, frustration-free Hamiltonians and p-spin ground states"};
  app.name("satscape");
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "INI/TOML file; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  Common c;
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed; instance i uses hash(seed, i)")->capture_default_str();
  app.add_option("--instances", c.instances, "Instances to generate")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--workers", c.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--enum-cap", c.enum_cap, "Largest n for exhaustive enumeration")
      ->capture_default_str()->envname("SATSCAPE_ENUM_CAP")->check(CLI::PositiveNumber);
  app.add_option("--qubit-cap", c.qubit_cap, "Largest K*m for state vectors")
      ->capture_default_str()->envname("SATSCAPE_QUBIT_CAP")->check(CLI::PositiveNumber);
  app.add_option("--pair-cap", c.pair_cap, "Largest set for pairwise distances")
      ->capture_default_str()->envname("SATSCAPE_PAIR_CAP")->check(CLI::PositiveNumber);
  app.add_option("--eta-budget", c.eta_budget, "Largest number of excluded sets for eta")
      ->capture_default_str()->envname("SATSCAPE_ETA_BUDGET")->check(CLI::PositiveNumber);

  FormulaSource src;
  Analysis an;
  HamiltonianOpts ho;
  PspinOpts po;
  ScanOpts so;
  DepthOpts dopt;

  auto* gen = app.add_subcommand("gen", "Generate random K-SAT formulas (DIMACS + sidecar)");
  add_source(gen, src);
  auto* en = app.add_subcommand("enumerate", "Enumerate SAT(Phi, r) or its eps-union");
  add_source(en, src);
  add_analysis(en, an, false);
  en->add_flag("--histogram", an.histogram, "Also write the pair-distance histogram");
  auto* og = app.add_subcommand("ogp", "Overlap histogram and OGP check");
  add_source(og, src);
  add_analysis(og, an, true);
  auto* cl = app.add_subcommand("cluster", "(nu1, nu2)-clustering of the solution set");
  add_source(cl, src);
  add_analysis(cl, an, true);
  cl->add_option("--c1", an.c1, "Rate for the per-cluster size check")->capture_default_str();
  cl->add_option("--c2", an.c2, "Rate for the total size check")->capture_default_str();
  auto* ha = app.add_subcommand("hamiltonian", "Ground or near-ground state of the clause Hamiltonian");
  add_source(ha, src);
  ha->add_option("--gamma", ho.gamma, "Q(gamma) weight")->capture_default_str();
  ha->add_option("--exclude", ho.exclude, "Variables outside S (minus-CAT factor there)")->delimiter(',');
  ha->add_flag("--dump-state", ho.dump_state, "Write the state vector");
  auto* ps = app.add_subcommand("pspin", "p-spin model on random regular hypergraphs");
  ps->add_option("--n", po.n, "Nodes")->required();
  ps->add_option("--d", po.d, "Degree")->required();
  ps->add_option("--p", po.p, "Hyperedge size")->capture_default_str();
  ps->add_option("--slack", po.slack, "Write configurations within this energy of the minimum");
  ps->add_option("--gamma", po.gamma, "Quantize and write the ground-state measurement");
  ps->add_option("--max-retries", po.max_retries, "Configuration-model resampling cap")->capture_default_str();
  auto* ts = app.add_subcommand("theory-scan", "Scan (K, nu1, nu2, eps, lambda, gamma, eta, delta)");
  ts->add_option("--alpha", so.alpha, "Density ratio in (0.7, 1)")->capture_default_str();
  ts->add_option("--K", so.Ks, "Clause widths")->delimiter(',')->capture_default_str();
  ts->add_option("--nu-step", so.nu_step, "nu grid step")->capture_default_str();
  ts->add_option("--s-step", so.s_step, "Overlap grid step")->capture_default_str();
  auto* db = app.add_subcommand("depth-bound", "Circuit depth lower bound from the overlap gap");
  db->add_option("--d", dopt.d, "Distance in bits");
  db->add_option("--nu2", dopt.nu2, "Distance as a fraction of --n-bits");
  db->add_option("--n-bits", dopt.n_bits, "Number of bits")->required();
  db->add_option("--mu", dopt.mu, "Probability in (0, 1)")->capture_default_str();
  db->add_option("--log-base", dopt.base, "Outer logarithm base: 2 or e")->capture_default_str();

  const auto started = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << error_record("validation", e.what(), kValidation).dump() << '\n';
    return kValidation;
  }

  auto* chosen = app.get_subcommands().front();
  try {
    Outputs files;
    json summary;
    const std::string name = chosen->get_name();
    if (name == "gen") summary = cmd_gen(c, src, files);
    else if (name == "enumerate") summary = cmd_enumerate(c, src, an, files);
    else if (name == "ogp") summary = cmd_ogp(c, src, an, files);
    else if (name == "cluster") summary = cmd_cluster(c, src, an, files);
    else if (name == "hamiltonian") summary = cmd_hamiltonian(c, src, ho, files);
    else if (name == "pspin") summary = cmd_pspin(c, po, files);
    else if (name == "theory-scan") summary = cmd_theory_scan(c, so, files);
    else summary = cmd_depth(dopt, files);

    files.add_json("summary.json", summary);
    const std::filesystem::path dir = c.out;
    auto listing = files.write_all(dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"schema", "satscape.manifest.v1"},
                  {"version", kVersion},
                  {"cli11", CLI11_VERSION},
                  {"subcommand", name},
                  {"master_seed", c.seed},
                  {"config", app.config_to_str(true, false)},
                  {"files", listing},
                  {"summary", summary},
                  {"wall_time_seconds", wall}};
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << listing.size() << " files to " << dir.string() << '\n';
    return kOk;
  } catch (const ResourceError& e) {
    auto rec = error_record("resource", e.what(), kResource);
    rec["budget"] = e.budget();
    err << rec.dump() << '\n';
    return kResource;
  } catch (const ParameterError& e) {
    err << error_record("validation", e.what(), kValidation).dump() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << error_record("validation", e.what(), kValidation).dump() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    err << error_record("validation", e.what(), kValidation).dump() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << error_record("internal", e.what(), kInternal).dump() << '\n';
    return kInternal;
  }
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace satscape::cli
