#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "satscape/errors.hpp"
#include "satscape/pspin.hpp"

using namespace satscape;
using namespace satscape::pspin;

namespace {

RegularHypergraph single_edge(std::vector<std::uint32_t> nodes, std::uint32_t n) {
  RegularHypergraph g;
  g.n = n;
  g.d = 1;
  g.p = static_cast<std::uint32_t>(nodes.size());
  g.edges = {std::move(nodes)};
  return g;
}

std::int64_t naive_energy(const RegularHypergraph& g, const CouplingVector& J, std::uint64_t code) {
  std::int64_t e = 0;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    int prod = J.J[k];
    for (auto v : g.edges[k]) prod *= ((code >> v) & 1U) ? -1 : 1;
    e += prod;
  }
  return e;
}

using EdgeMultiset = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

EdgeMultiset canonical(const RegularHypergraph& g) {
  EdgeMultiset out;
  for (const auto& e : g.edges) out.emplace_back(std::min(e[0], e[1]), std::max(e[0], e[1]));
  std::sort(out.begin(), out.end());
  return out;
}

// Every loopless 2-regular multigraph on 4 nodes with 4 edges.
std::set<EdgeMultiset> feasible_n4_d2() {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = a + 1; b < 4; ++b) pairs.emplace_back(a, b);
  std::set<EdgeMultiset> out;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a; b < 6; ++b)
      for (std::size_t c = b; c < 6; ++c)
        for (std::size_t d = c; d < 6; ++d) {
          EdgeMultiset m{pairs[a], pairs[b], pairs[c], pairs[d]};
          std::vector<int> deg(4, 0);
          for (auto [u, v] : m) ++deg[u], ++deg[v];
          if (std::all_of(deg.begin(), deg.end(), [](int x) { return x == 2; })) out.insert(m);
        }
  return out;
}

}  // namespace

TEST_CASE("regular hypergraphs have exact degrees") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (auto [n, d, p] : {std::tuple{12u, 3u, 2u}, std::tuple{12u, 4u, 3u}, std::tuple{20u, 6u, 4u}}) {
      const auto g = generate_regular_hypergraph(n, d, p, seed);
      CHECK(g.edge_count() == n * d / p);
      const auto deg = g.degrees();
      CHECK(std::all_of(deg.begin(), deg.end(), [d](auto x) { return x == d; }));
      for (const auto& e : g.edges) {
        CHECK(e.size() == p);
        CHECK(std::set<std::uint32_t>(e.begin(), e.end()).size() == p);
      }
    }
  }
}

TEST_CASE("n=4, d=2, p=2 outcomes are feasible pairings") {
  const auto feasible = feasible_n4_d2();
  std::set<EdgeMultiset> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = generate_regular_hypergraph(4, 2, 2, seed);
    CHECK(g.edge_count() == 4);
    const auto c = canonical(g);
    CHECK(feasible.count(c) == 1);
    seen.insert(c);
  }
  CHECK(seen.size() > 1);
}

TEST_CASE("hypergraph edge cases and errors") {
  const auto g = generate_regular_hypergraph(5, 1, 5, 3);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edge_mask(0) == 0b11111);
  CHECK_THROWS_AS(generate_regular_hypergraph(5, 3, 2, 1), ParameterError);
  CHECK_THROWS_AS(generate_regular_hypergraph(5, 1, 1, 1), ParameterError);
  CHECK_THROWS_AS(generate_regular_hypergraph(4, 3, 6, 1), ParameterError);
  CHECK(generate_regular_hypergraph(10, 3, 2, 9).edges == generate_regular_hypergraph(10, 3, 2, 9).edges);
  CHECK_THROWS_AS(generate_regular_hypergraph(6, 3, 2, 1, SpinLimits{30, 0, 1}), ResourceError);
}

TEST_CASE("energy examples") {
  const auto g = single_edge({0, 1}, 2);
  CHECK(energy(g, CouplingVector{{+1}, 0}, SpinConfig{+1, -1}) == -1);
  const auto h = generate_regular_hypergraph(10, 3, 2, 4);
  CouplingVector ones{std::vector<int>(h.edge_count(), 1), 0};
  CHECK(energy(h, ones, SpinConfig(10, +1)) == static_cast<std::int64_t>(h.edge_count()));
  CHECK_THROWS_AS(energy(h, ones, SpinConfig(9, +1)), ParameterError);
  CHECK_THROWS_AS(energy(h, ones, SpinConfig(10, 2)), ParameterError);
  CHECK(spin_code(SpinConfig{+1, -1, -1}) == 0b110);
  CHECK(spins_from_code(0b110, 3) == SpinConfig{+1, -1, -1});
}

TEST_CASE("energies agree with direct evaluation and the local-field identity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto [n, d, p] : {std::tuple{10u, 3u, 2u}, std::tuple{9u, 2u, 3u}, std::tuple{8u, 3u, 4u}}) {
      const auto g = generate_regular_hypergraph(n, d, p, seed);
      const auto J = generate_couplings(g, seed + 1);
      const auto m = static_cast<std::int64_t>(g.edge_count());
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        const auto e = energy_of_code(g, J, code);
        CHECK(e == naive_energy(g, J, code));
        CHECK(e == energy(g, J, spins_from_code(code, n)));
        CHECK(std::abs(e) <= m);
        CHECK((e - m) % 2 == 0);
        if (code % 7 != 0) continue;
        const auto sigma = spins_from_code(code, n);
        for (std::uint32_t i = 0; i < n; ++i) {
          std::int64_t field = 0;
          for (std::size_t k = 0; k < g.edge_count(); ++k) {
            if (!((g.edge_mask(k) >> i) & 1U)) continue;
            int prod = J.J[k];
            for (auto v : g.edges[k]) prod *= sigma[v];
            field += prod;
          }
          const auto delta = energy_of_code(g, J, code ^ (std::uint64_t{1} << i)) - e;
          CHECK(delta == -2 * field);
          CHECK(std::abs(delta) <= 2 * static_cast<std::int64_t>(d));
        }
      }
    }
  }
}

TEST_CASE("global flip symmetry") {
  const auto g = generate_regular_hypergraph(10, 4, 2, 8);
  const auto J = generate_couplings(g, 2);
  const auto odd = generate_regular_hypergraph(9, 2, 3, 8);
  const auto Jo = generate_couplings(odd, 2);
  for (std::uint64_t code = 0; code < 512; ++code) {
    CHECK(energy_of_code(g, J, code) == energy_of_code(g, J, code ^ 0x3FF));
    CHECK(energy_of_code(odd, Jo, code) == -energy_of_code(odd, Jo, code ^ 0x1FF));
  }
}

TEST_CASE("brute-force ground state") {
  CHECK(ground_state_bruteforce(single_edge({0, 1}, 2), CouplingVector{{+1}, 0}).energy == -1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto [n, d, p] : {std::tuple{12u, 3u, 2u}, std::tuple{12u, 2u, 3u}, std::tuple{12u, 3u, 4u}}) {
      const auto g = generate_regular_hypergraph(n, d, p, seed);
      const auto J = generate_couplings(g, seed);
      std::int64_t best = INT64_MAX;
      std::uint64_t arg = 0;
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        const auto e = naive_energy(g, J, code);
        if (e < best) best = e, arg = code;
      }
      const auto gs = ground_state_bruteforce(g, J, SpinLimits{30, 1'000'000, 1 + seed % 3});
      CHECK(gs.energy == best);
      CHECK(gs.code == arg);
      CHECK(gs.sigma == spins_from_code(arg, n));
    }
  }
  const auto big = generate_regular_hypergraph(32, 2, 2, 1);
  CHECK_THROWS_AS(ground_state_bruteforce(big, generate_couplings(big, 1)), ResourceError);
}

TEST_CASE("ground energies are negative at n=16, d=4, p=2") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_regular_hypergraph(16, 4, 2, seed);
    CHECK(ground_state_bruteforce(g, generate_couplings(g, seed)).energy < 0);
  }
}

TEST_CASE("near-ground sets") {
  const auto g = generate_regular_hypergraph(10, 3, 2, 6);
  const auto J = generate_couplings(g, 6);
  const auto m = static_cast<std::int64_t>(g.edge_count());
  CHECK(near_ground_set(g, J, 2 * m).size() == 1024);
  const auto gs = ground_state_bruteforce(g, J);
  const auto A = near_ground_set(g, J, 0);
  CHECK(A.n == 10);
  CHECK(A.contains(gs.code));
  for (auto c : A.members) {
    CHECK(energy_of_code(g, J, c) == gs.energy);
    CHECK(A.contains(c ^ 0x3FF));
  }
  std::size_t count = 0;
  for (std::uint64_t c = 0; c < 1024; ++c) count += naive_energy(g, J, c) <= gs.energy + 2;
  CHECK(near_ground_set(g, J, 2).size() == count);
  CHECK_THROWS_AS(near_ground_set(g, J, -1), ParameterError);
}

TEST_CASE("quantized constraints") {
  const auto g = single_edge({0, 1}, 2);
  const auto sys = constraint_system(g, CouplingVector{{+1}, 0});
  REQUIRE(sys.constraints.size() == 1);
  auto f = sys.constraints[0].forbidden;
  std::sort(f.begin(), f.end());
  CHECK(f == std::vector<std::uint64_t>{0b00, 0b11});
  auto fm = constraint_system(g, CouplingVector{{-1}, 0}).constraints[0].forbidden;
  std::sort(fm.begin(), fm.end());
  CHECK(fm == std::vector<std::uint64_t>{0b01, 0b10});
  const auto h = generate_regular_hypergraph(8, 3, 4, 2);
  const auto J = generate_couplings(h, 3);
  const auto S = constraint_system(h, J);
  for (std::uint64_t code = 0; code < 256; ++code) {
    const auto e = energy_of_code(h, J, code);
    // raising edges contribute +1, the rest -1
    CHECK(static_cast<std::int64_t>(S.violations(code)) == (e + static_cast<std::int64_t>(h.edge_count())) / 2);
  }
  for (const auto& c : S.constraints) CHECK(c.forbidden.size() == 8);
}

TEST_CASE("quantized instances against the dense oracle") {
  std::vector<std::pair<RegularHypergraph, CouplingVector>> cases;
  cases.emplace_back(single_edge({0, 1}, 2), CouplingVector{{+1}, 0});
  cases.emplace_back(single_edge({0, 1, 2}, 3), CouplingVector{{-1}, 0});
  cases.emplace_back(single_edge({0, 1, 2, 3}, 4), CouplingVector{{+1}, 0});
  const auto g = generate_regular_hypergraph(4, 2, 2, 5);
  cases.emplace_back(g, generate_couplings(g, 5));
  for (const auto& [graph, J] : cases) {
    for (double gamma : {0.25, 0.5, 0.9}) {
      const auto q = quantize(graph, J, gamma);
      const auto M = oracle::model_of(constraint_system(graph, J));
      const auto psi = q.ground_state();
      CHECK(total_energy(q.layout, psi, gamma) <= 1e-10);
      const auto p = measurement_distribution(psi);
      const auto ref = oracle::ground_weights(M, gamma);
      for (std::size_t z = 0; z < p.size(); ++z) CHECK(std::abs(p[z] - ref[z]) <= 1e-12);
      const auto v = oracle::to_eigen(psi);
      for (std::uint32_t i = 0; i < graph.n; ++i) {
        CHECK(q.layout.support_size(i) == graph.d * graph.p);
        const oracle::Vector hd = oracle::h_matrix(M, i, gamma) * v;
        CHECK(hd.norm() <= 1e-10);
        const auto r = oracle::random_state(q.layout.qubit_count(), i);
        const oracle::Vector hr = oracle::h_matrix(M, i, gamma) * oracle::to_eigen(r);
        const auto mine = apply_h_i(q.layout, r, i, gamma);
        double err = 0;
        for (std::size_t z = 0; z < mine.dimension(); ++z) err = std::max(err, std::abs(mine[z] - hr(z)));
        CHECK(err <= 1e-12 * std::max(1.0, hr.cwiseAbs().maxCoeff()));
      }
    }
  }
  const auto big = generate_regular_hypergraph(8, 3, 2, 1);
  CHECK_THROWS_AS(quantize(big, generate_couplings(big, 1), 0.5), ResourceError);
}

TEST_CASE("hypergraph JSON round trip and energy CSV") {
  const auto g = generate_regular_hypergraph(12, 3, 4, 77);
  const auto J = generate_couplings(g, 78);
  const auto j = hypergraph_json(g, J);
  CHECK(j["schema"] == "satscape.hypergraph.v1");
  const auto [g2, J2] = parse_hypergraph_json(nlohmann::json::parse(j.dump()));
  CHECK(g2.edges == g.edges);
  CHECK(g2.n == 12);
  CHECK(g2.seed == 77);
  CHECK(J2.J == J.J);
  CHECK(J2.seed == 78);
  auto bad = j;
  bad["edges"][0][0] = 99;
  CHECK_THROWS_AS(parse_hypergraph_json(bad), ParameterError);
  const auto gs = ground_state_bruteforce(g, J);
  const auto csv = energies_csv({EnergyRow{77, &g, gs}});
  CHECK(csv.starts_with("# satscape.pspin_energy v1\nseed,n,d,p,m,ground_energy,per_spin,ground_state\n"));
}
