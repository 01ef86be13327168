#include "satscape/pspin.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

#include "satscape/errors.hpp"
#include "satscape/io.hpp"
#include "satscape/parallel.hpp"
#include "satscape/rng.hpp"

namespace satscape::pspin {
namespace {

void check_instance(const RegularHypergraph& g, const CouplingVector& J) {
  if (J.J.size() != g.edges.size())
    throw ParameterError("coupling vector has " + std::to_string(J.J.size()) + " entries for " +
                         std::to_string(g.edges.size()) + " hyperedges");
}

void check_spins(const RegularHypergraph& g, const SpinLimits& limits) {
  if (g.n > limits.max_spins || g.n > 62)
    throw ResourceError("max_spins=" + std::to_string(limits.max_spins),
                        "exhaustive search over " + std::to_string(g.n) + " spins");
}

// Gray-code sweep over the low `low` bits of codes prefix << low. Calls
// visit(code, energy) for every code in the block.
template <class Visit>
void sweep_block(const RegularHypergraph& g, const CouplingVector& J,
                 const std::vector<std::vector<std::uint32_t>>& incident, std::uint64_t start,
                 std::uint32_t low, Visit&& visit) {
  std::vector<int> term(g.edges.size());
  std::int64_t e = 0;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const int sign = (std::popcount(start & g.edge_mask(k)) & 1) ? -1 : 1;
    term[k] = J.J[k] * sign;
    e += term[k];
  }
  std::uint64_t code = start;
  visit(code, e);
  const std::uint64_t count = std::uint64_t{1} << low;
  for (std::uint64_t t = 1; t < count; ++t) {
    const auto i = static_cast<std::uint32_t>(std::countr_zero(t));
    code ^= std::uint64_t{1} << i;
    for (auto k : incident[i]) {
      e -= 2 * term[k];
      term[k] = -term[k];
    }
    visit(code, e);
  }
}

std::vector<std::vector<std::uint32_t>> incidence(const RegularHypergraph& g) {
  std::vector<std::vector<std::uint32_t>> inc(g.n);
  for (std::uint32_t k = 0; k < g.edges.size(); ++k)
    for (auto v : g.edges[k]) inc[v].push_back(k);
  return inc;
}

}  // namespace

std::vector<std::uint32_t> RegularHypergraph::degrees() const {
  std::vector<std::uint32_t> deg(n, 0);
  for (const auto& e : edges)
    for (auto v : e) ++deg.at(v);
  return deg;
}

std::uint64_t RegularHypergraph::edge_mask(std::size_t e) const {
  std::uint64_t m = 0;
  for (auto v : edges.at(e)) m |= std::uint64_t{1} << v;
  return m;
}

std::uint64_t spin_code(const SpinConfig& sigma) {
  if (sigma.size() > 64) throw ParameterError("spin codes need n <= 64");
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] != 1 && sigma[i] != -1) throw ParameterError("spins must be +1 or -1");
    if (sigma[i] == -1) code |= std::uint64_t{1} << i;
  }
  return code;
}

SpinConfig spins_from_code(std::uint64_t code, std::uint32_t n) {
  SpinConfig s(n);
  for (std::uint32_t i = 0; i < n; ++i) s[i] = ((code >> i) & 1U) ? -1 : 1;
  return s;
}

RegularHypergraph generate_regular_hypergraph(std::uint32_t n, std::uint32_t d, std::uint32_t p,
                                              std::uint64_t seed, const SpinLimits& limits) {
  if (p < 2) throw ParameterError("hyperedges need p >= 2");
  if (n < 1 || d < 1) throw ParameterError("need n >= 1 and d >= 1");
  if ((std::uint64_t{n} * d) % p != 0) throw ParameterError("n*d must be divisible by p");
  if (p > n) throw ParameterError("p exceeds n; no hyperedge of distinct nodes exists");
  std::vector<std::uint32_t> stubs;
  stubs.reserve(std::size_t{n} * d);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t k = 0; k < d; ++k) stubs.push_back(v);
  Rng rng(seed);
  for (std::uint64_t attempt = 0; attempt < limits.max_retries; ++attempt) {
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
    bool ok = true;
    for (std::size_t s = 0; ok && s < stubs.size(); s += p) {
      for (std::size_t a = s; ok && a < s + p; ++a)
        for (std::size_t b = a + 1; b < s + p; ++b)
          if (stubs[a] == stubs[b]) {
            ok = false;
            break;
          }
    }
    if (!ok) continue;
    RegularHypergraph g{n, d, p, seed, {}};
    for (std::size_t s = 0; s < stubs.size(); s += p)
      g.edges.emplace_back(stubs.begin() + s, stubs.begin() + s + p);
    return g;
  }
  throw ResourceError("max_retries=" + std::to_string(limits.max_retries),
                      "no pairing without repeated nodes found");
}

CouplingVector generate_couplings(const RegularHypergraph& g, std::uint64_t seed) {
  Rng rng(seed);
  CouplingVector J{std::vector<int>(g.edges.size()), seed};
  for (auto& j : J.J) j = rng.coin() ? 1 : -1;
  return J;
}

std::int64_t energy(const RegularHypergraph& g, const CouplingVector& J, const SpinConfig& sigma) {
  check_instance(g, J);
  if (sigma.size() != g.n) throw ParameterError("spin configuration length differs from n");
  std::int64_t e = 0;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    int prod = J.J[k];
    for (auto v : g.edges[k]) {
      if (sigma[v] != 1 && sigma[v] != -1) throw ParameterError("spins must be +1 or -1");
      prod *= sigma[v];
    }
    e += prod;
  }
  return e;
}

std::int64_t energy_of_code(const RegularHypergraph& g, const CouplingVector& J, std::uint64_t code) {
  check_instance(g, J);
  std::int64_t e = 0;
  for (std::size_t k = 0; k < g.edges.size(); ++k)
    e += (std::popcount(code & g.edge_mask(k)) & 1) ? -J.J[k] : J.J[k];
  return e;
}

GroundState ground_state_bruteforce(const RegularHypergraph& g, const CouplingVector& J,
                                    const SpinLimits& limits) {
  check_instance(g, J);
  check_spins(g, limits);
  const bool symmetric = g.p % 2 == 0;
  const std::uint32_t free_bits = symmetric ? g.n - 1 : g.n;
  const std::uint32_t low = std::min<std::uint32_t>(free_bits, 16);
  const std::uint64_t blocks = std::uint64_t{1} << (free_bits - low);
  const auto inc = incidence(g);

  struct Best {
    std::int64_t energy = std::numeric_limits<std::int64_t>::max();
    std::uint64_t code = 0;
  };
  std::vector<Best> best(blocks);
  parallel_for(blocks, limits.workers, [&](std::size_t b) {
    Best local;
    sweep_block(g, J, inc, std::uint64_t{b} << low, low, [&](std::uint64_t code, std::int64_t e) {
      if (e < local.energy || (e == local.energy && code < local.code)) local = {e, code};
    });
    best[b] = local;
  });
  Best out;
  for (const auto& b : best)
    if (b.energy < out.energy || (b.energy == out.energy && b.code < out.code)) out = b;
  return {spins_from_code(out.code, g.n), out.code, out.energy};
}

SolutionSet near_ground_set(const RegularHypergraph& g, const CouplingVector& J, std::int64_t slack,
                            const SpinLimits& limits) {
  if (slack < 0) throw ParameterError("slack must be nonnegative");
  const auto ground = ground_state_bruteforce(g, J, limits);
  const std::int64_t ceiling = ground.energy + slack;
  const std::uint32_t low = std::min<std::uint32_t>(g.n, 16);
  const std::uint64_t blocks = std::uint64_t{1} << (g.n - low);
  const auto inc = incidence(g);
  std::vector<std::vector<std::uint64_t>> found(blocks);
  parallel_for(blocks, limits.workers, [&](std::size_t b) {
    sweep_block(g, J, inc, std::uint64_t{b} << low, low, [&](std::uint64_t code, std::int64_t e) {
      if (e <= ceiling) found[b].push_back(code);
    });
  });
  std::vector<std::uint64_t> members;
  for (auto& f : found) members.insert(members.end(), f.begin(), f.end());
  return SolutionSet::from_members(g.n, std::move(members));
}

ConstraintSystem constraint_system(const RegularHypergraph& g, const CouplingVector& J) {
  check_instance(g, J);
  if (g.p > 20) throw ParameterError("quantization enumerates 2^p local patterns; p too large");
  ConstraintSystem sys;
  sys.n = g.n;
  sys.width = g.p;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    LocalConstraint c;
    c.vars = g.edges[k];
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << g.p); ++b) {
      const int prod = (std::popcount(b) & 1) ? -1 : 1;
      if (prod == J.J[k]) c.forbidden.push_back(b);
    }
    sys.constraints.push_back(std::move(c));
  }
  return sys;
}

QuantizedInstance quantize(const RegularHypergraph& g, const CouplingVector& J, double gamma,
                           const HamiltonianLimits& limits) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
  return {QubitLayout::build(constraint_system(g, J), limits), gamma};
}

nlohmann::json hypergraph_json(const RegularHypergraph& g, const CouplingVector& J) {
  check_instance(g, J);
  return {{"schema", "satscape.hypergraph.v1"},
          {"n", g.n},
          {"d", g.d},
          {"p", g.p},
          {"seed", g.seed},
          {"coupling_seed", J.seed},
          {"edges", g.edges},
          {"couplings", J.J}};
}

std::pair<RegularHypergraph, CouplingVector> parse_hypergraph_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "satscape.hypergraph.v1") throw ParameterError("not a satscape hypergraph");
  RegularHypergraph g;
  g.n = j.at("n").get<std::uint32_t>();
  g.d = j.at("d").get<std::uint32_t>();
  g.p = j.at("p").get<std::uint32_t>();
  g.seed = j.at("seed").get<std::uint64_t>();
  g.edges = j.at("edges").get<std::vector<std::vector<std::uint32_t>>>();
  CouplingVector J{j.at("couplings").get<std::vector<int>>(), j.at("coupling_seed").get<std::uint64_t>()};
  for (const auto& e : g.edges) {
    if (e.size() != g.p) throw ParameterError("hyperedge size differs from p");
    for (auto v : e)
      if (v >= g.n) throw ParameterError("hyperedge node out of range");
  }
  for (int c : J.J)
    if (c != 1 && c != -1) throw ParameterError("couplings must be +1 or -1");
  check_instance(g, J);
  return {std::move(g), std::move(J)};
}

std::string energies_csv(const std::vector<EnergyRow>& rows) {
  std::ostringstream os;
  os << "# satscape.pspin_energy v1\nseed,n,d,p,m,ground_energy,per_spin,ground_state\n";
  for (const auto& r : rows) {
    const auto& g = *r.graph;
    os << r.seed << ',' << g.n << ',' << g.d << ',' << g.p << ',' << g.edge_count() << ','
       << r.ground.energy << ','
       << io::format_double(static_cast<double>(r.ground.energy) / g.n) << ','
       << bits_to_string(r.ground.code, g.n) << '\n';
  }
  return os.str();
}

}  // namespace satscape::pspin
