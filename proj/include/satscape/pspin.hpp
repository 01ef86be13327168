#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satscape/hamiltonian.hpp"
#include "satscape/landscape.hpp"
#include "json.hpp"

namespace satscape::pspin {

/// m = n d / p hyperedges of p distinct nodes each; every node lies in
/// exactly d hyperedges. The same node set may appear more than once.
struct RegularHypergraph {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t p = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint32_t>> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }
  std::vector<std::uint32_t> degrees() const;
  /// Bitmask of the nodes of edge e (n <= 64).
  std::uint64_t edge_mask(std::size_t e) const;
};

struct CouplingVector {
  std::vector<int> J;  // each +1 or -1
  std::uint64_t seed = 0;
};

/// sigma[i] in {+1, -1}.
using SpinConfig = std::vector<int>;

/// Spin code: bit i is set iff sigma_i = -1 (n <= 64).
std::uint64_t spin_code(const SpinConfig& sigma);
SpinConfig spins_from_code(std::uint64_t code, std::uint32_t n);

struct SpinLimits {
  std::uint32_t max_spins = 30;
  std::uint64_t max_retries = 1'000'000;
  std::size_t workers = 1;
};

/// Configuration model: shuffle n d stubs, cut into groups of p, and
/// resample the whole pairing until no group repeats a node.
RegularHypergraph generate_regular_hypergraph(std::uint32_t n, std::uint32_t d, std::uint32_t p,
                                              std::uint64_t seed, const SpinLimits& limits = {});

CouplingVector generate_couplings(const RegularHypergraph& g, std::uint64_t seed);

/// H(sigma) = sum_e J_e prod_{i in e} sigma_i.
std::int64_t energy(const RegularHypergraph& g, const CouplingVector& J, const SpinConfig& sigma);
std::int64_t energy_of_code(const RegularHypergraph& g, const CouplingVector& J, std::uint64_t code);

struct GroundState {
  SpinConfig sigma;
  std::uint64_t code = 0;
  std::int64_t energy = 0;
};

/// Exhaustive minimum; ties go to the smallest spin code. For even p only
/// codes with sigma_{n-1} = +1 are searched.
GroundState ground_state_bruteforce(const RegularHypergraph& g, const CouplingVector& J,
                                    const SpinLimits& limits = {});

/// Every configuration with H <= min + slack, as spin codes.
SolutionSet near_ground_set(const RegularHypergraph& g, const CouplingVector& J, std::int64_t slack,
                            const SpinLimits& limits = {});

/// Each hyperedge forbids the 2^(p-1) local patterns whose spin product
/// equals J_e, i.e. the configurations that raise the energy.
ConstraintSystem constraint_system(const RegularHypergraph& g, const CouplingVector& J);

struct QuantizedInstance {
  QubitLayout layout;
  double gamma = 0;

  StateVector ground_state() const { return satscape::ground_state(layout, gamma); }
};

QuantizedInstance quantize(const RegularHypergraph& g, const CouplingVector& J, double gamma,
                           const HamiltonianLimits& limits = {});

nlohmann::json hypergraph_json(const RegularHypergraph& g, const CouplingVector& J);
std::pair<RegularHypergraph, CouplingVector> parse_hypergraph_json(const nlohmann::json& j);

/// "# satscape.pspin_energy v1" / "seed,n,d,p,m,ground_energy,per_spin,ground_state"
struct EnergyRow {
  std::uint64_t seed = 0;
  const RegularHypergraph* graph = nullptr;
  GroundState ground;
};
std::string energies_csv(const std::vector<EnergyRow>& rows);

}  // namespace satscape::pspin
