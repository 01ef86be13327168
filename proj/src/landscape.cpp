#include "satscape/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "satscape/parallel.hpp"

namespace satscape {
namespace {

constexpr std::uint32_t kBlockBits = 16;
constexpr std::size_t kRowsPerUnit = 128;

// Lane masks for the low six variables of a 64-assignment word: lane t holds
// assignment base + t, so variable v < 6 reads bit v of t.
constexpr std::uint64_t kLaneBits[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

// A clause split into the part fixed within a 64-lane word (variables >= 6,
// compared against the word's base) and the lanes its low variables select.
struct SlicedClause {
  std::uint64_t high_mask;
  std::uint64_t high_value;
  std::uint64_t lanes;
};

SlicedClause slice(const ClauseMask& c) {
  SlicedClause s{c.mask & ~std::uint64_t{63}, c.value & ~std::uint64_t{63}, ~std::uint64_t{0}};
  for (std::uint32_t v = 0; v < 6; ++v) {
    if (!((c.mask >> v) & 1U)) continue;
    s.lanes &= ((c.value >> v) & 1U) ? kLaneBits[v] : ~kLaneBits[v];
  }
  return s;
}

std::vector<SlicedClause> slice_all(std::span<const ClauseMask> masks) {
  std::vector<SlicedClause> out;
  out.reserve(masks.size());
  for (const auto& m : masks) out.push_back(slice(m));
  return out;
}

// Lanes of the word starting at `base` whose violation count is <= r.
std::uint64_t surviving_lanes(std::span<const SlicedClause> clauses, std::uint64_t base,
                              std::uint32_t r, std::uint64_t valid) {
  if (r == 0) {
    std::uint64_t alive = valid;
    for (const auto& c : clauses) {
      if ((base & c.high_mask) == c.high_value) {
        alive &= ~c.lanes;
        if (!alive) break;
      }
    }
    return alive;
  }
  if (r >= clauses.size()) return valid;
  // Bit-sliced saturating counters; a lane that overflows the planes is dead.
  const std::uint32_t planes = static_cast<std::uint32_t>(std::bit_width(std::uint64_t{r} + 1));
  std::uint64_t count[64] = {};
  std::uint64_t overflow = ~valid;
  std::size_t since_check = 0;
  for (const auto& c : clauses) {
    if ((base & c.high_mask) != c.high_value) continue;
    std::uint64_t carry = c.lanes & ~overflow;
    for (std::uint32_t b = 0; b < planes && carry; ++b) {
      const std::uint64_t next = count[b] & carry;
      count[b] ^= carry;
      carry = next;
    }
    overflow |= carry;
    if (++since_check == 16) {
      since_check = 0;
      if (overflow == ~std::uint64_t{0}) return 0;
    }
  }
  // lanes with count > r
  std::uint64_t greater = 0, equal = ~std::uint64_t{0};
  for (int b = static_cast<int>(planes) - 1; b >= 0; --b) {
    if ((r >> b) & 1U) {
      equal &= count[b];
    } else {
      greater |= equal & count[b];
      equal &= ~count[b];
    }
  }
  return ~greater & ~overflow & valid;
}

void check_enumerable(std::uint32_t n, const EnumerationLimits& limits) {
  if (n > limits.max_variables || n > 62)
    throw ResourceError("max_variables=" + std::to_string(limits.max_variables),
                        "enumeration over n=" + std::to_string(n) + " variables");
}

// Scans {0,1}^n in blocks of 2^16; `block_lanes(base)` returns the accepted
// lanes of the 64-assignment word starting at base.
template <class Accept>
std::vector<std::uint64_t> scan_space(std::uint32_t n, std::size_t workers, Accept&& accept) {
  const std::uint64_t space = std::uint64_t{1} << n;
  const std::uint64_t block = std::min<std::uint64_t>(space, std::uint64_t{1} << kBlockBits);
  const std::size_t blocks = static_cast<std::size_t>(space / block);
  const std::uint64_t valid = space >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << space) - 1;
  std::vector<std::vector<std::uint64_t>> found(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    auto& out = found[b];
    const std::uint64_t start = b * block;
    for (std::uint64_t base = start; base < start + block; base += 64) {
      std::uint64_t lanes = accept(base, valid);
      while (lanes) {
        out.push_back(base + static_cast<std::uint64_t>(std::countr_zero(lanes)));
        lanes &= lanes - 1;
      }
    }
  });
  std::size_t total = 0;
  for (const auto& f : found) total += f.size();
  std::vector<std::uint64_t> members;
  members.reserve(total);
  for (auto& f : found) members.insert(members.end(), f.begin(), f.end());
  return members;
}

std::uint32_t distance(std::uint64_t a, std::uint64_t b) noexcept {
  return static_cast<std::uint32_t>(std::popcount(a ^ b));
}

void check_pair_cap(const SolutionSet& A, const EnumerationLimits& limits) {
  if (A.size() > limits.max_pair_set)
    throw ResourceError("max_pair_set=" + std::to_string(limits.max_pair_set),
                        "pairwise analysis of " + std::to_string(A.size()) + " members");
}

void check_interval(double nu1, double nu2) {
  if (!(nu1 > 0.0) || !(nu2 > nu1) || !std::isfinite(nu2))
    throw ParameterError("overlap interval needs 0 < nu1 < nu2");
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t size) : parent_(size) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

SolutionSet SolutionSet::from_members(std::uint32_t n, std::vector<std::uint64_t> members) {
  if (n > 64) throw ParameterError("solution sets hold n <= 64 variables");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (n < 64 && !members.empty() && members.back() >> n)
    throw ParameterError("member has bits above n");
  SolutionSet s;
  s.n = n;
  s.members = std::move(members);
  return s;
}

bool SolutionSet::contains(std::uint64_t x) const {
  return std::binary_search(members.begin(), members.end(), x);
}

SolutionSet enumerate_sat(const Formula& f, std::uint32_t r, const std::optional<VariableSet>& S,
                          const EnumerationLimits& limits) {
  const std::uint32_t n = f.variable_count();
  check_enumerable(n, limits);
  std::vector<ClauseMask> masks;
  if (S) {
    if (S->universe() != n) throw ParameterError("restriction universe differs from n");
    masks = f.violation_masks(f.clauses_within(*S));
  } else {
    masks = f.violation_masks();
  }
  const auto sliced = slice_all(masks);
  SolutionSet out;
  out.n = n;
  out.r = r;
  out.restriction = S;
  out.members = scan_space(n, limits.workers, [&](std::uint64_t base, std::uint64_t valid) {
    return surviving_lanes(sliced, base, r, valid);
  });
  return out;
}

SolutionSet enumerate_sat_eps(const Formula& f, double eps, std::uint32_t r,
                              const EnumerationLimits& limits) {
  const std::uint32_t n = f.variable_count();
  check_enumerable(n, limits);
  const std::uint32_t k = excluded_count(eps, n);
  const std::uint64_t sets = binomial(n, k);
  const std::uint64_t space = std::uint64_t{1} << n;
  if (sets > limits.eps_budget / space)
    throw ResourceError("eps_budget=" + std::to_string(limits.eps_budget),
                        "eps-union over " + std::to_string(sets) + " subsets of 2^" +
                            std::to_string(n) + " assignments");

  // One sliced clause list per excluded set: the clauses avoiding it.
  std::vector<std::vector<SlicedClause>> per_subset;
  per_subset.reserve(static_cast<std::size_t>(sets));
  const auto all_masks = f.violation_masks();
  std::vector<std::uint64_t> var_masks;
  for (std::size_t j = 0; j < f.clause_count(); ++j)
    if (!f.clause(j).is_tautology()) var_masks.push_back(f.variable_mask(j));
  std::vector<std::uint32_t> combo(k);
  std::iota(combo.begin(), combo.end(), 0U);
  for (;;) {
    std::uint64_t excluded = 0;
    for (auto v : combo) excluded |= std::uint64_t{1} << v;
    std::vector<SlicedClause> kept;
    for (std::size_t j = 0; j < all_masks.size(); ++j)
      if (!(var_masks[j] & excluded)) kept.push_back(slice(all_masks[j]));
    per_subset.push_back(std::move(kept));
    int t = static_cast<int>(k) - 1;
    while (t >= 0 && combo[t] == n - k + static_cast<std::uint32_t>(t)) --t;
    if (t < 0) break;
    ++combo[t];
    for (std::uint32_t u = static_cast<std::uint32_t>(t) + 1; u < k; ++u) combo[u] = combo[u - 1] + 1;
  }

  SolutionSet out;
  out.n = n;
  out.r = r;
  out.members = scan_space(n, limits.workers, [&](std::uint64_t base, std::uint64_t valid) {
    std::uint64_t lanes = 0;
    for (const auto& clauses : per_subset) {
      lanes |= surviving_lanes(clauses, base, r, valid & ~lanes);
      if (lanes == valid) break;
    }
    return lanes;
  });
  return out;
}

std::uint64_t OverlapHistogram::total_pairs() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

OverlapHistogram overlap_histogram(const SolutionSet& A, const EnumerationLimits& limits) {
  check_pair_cap(A, limits);
  const auto& xs = A.members;
  const std::size_t units = (xs.size() + kRowsPerUnit - 1) / kRowsPerUnit;
  std::vector<std::vector<std::uint64_t>> partial(units, std::vector<std::uint64_t>(A.n + 1, 0));
  parallel_for(units, limits.workers, [&](std::size_t u) {
    auto& h = partial[u];
    const std::size_t end = std::min(xs.size(), (u + 1) * kRowsPerUnit);
    for (std::size_t i = u * kRowsPerUnit; i < end; ++i) {
      const std::uint64_t a = xs[i];
      for (std::size_t j = i + 1; j < xs.size(); ++j) ++h[distance(a, xs[j])];
    }
  });
  OverlapHistogram out{A.n, std::vector<std::uint64_t>(A.n + 1, 0)};
  for (const auto& h : partial)
    for (std::size_t d = 0; d < h.size(); ++d) out.counts[d] += h[d];
  return out;
}

DistanceThresholds distance_thresholds(std::uint32_t n, double nu1, double nu2) {
  check_interval(nu1, nu2);
  // Tolerate nu * n landing a rounding error away from an integer.
  constexpr double slack = 1e-9;
  const double near = std::floor(nu1 * n + slack);
  const double far = std::ceil(nu2 * n - slack);
  return {static_cast<std::uint32_t>(std::min<double>(near, n)),
          static_cast<std::uint32_t>(std::min<double>(far, std::numeric_limits<std::uint32_t>::max()))};
}

OgpResult detect_ogp(const SolutionSet& A, double nu1, double nu2, const EnumerationLimits& limits) {
  const auto th = distance_thresholds(A.n, nu1, nu2);
  check_pair_cap(A, limits);
  const auto& xs = A.members;
  const std::size_t units = (xs.size() + kRowsPerUnit - 1) / kRowsPerUnit;
  std::atomic<std::size_t> first_unit{units};
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> found(units);
  parallel_for(units, limits.workers, [&](std::size_t u) {
    if (u > first_unit.load(std::memory_order_relaxed)) return;
    const std::size_t end = std::min(xs.size(), (u + 1) * kRowsPerUnit);
    for (std::size_t i = u * kRowsPerUnit; i < end; ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        const auto d = distance(xs[i], xs[j]);
        if (d > th.near && d < th.far) {
          found[u] = std::make_pair(i, j);
          std::size_t cur = first_unit.load();
          while (u < cur && !first_unit.compare_exchange_weak(cur, u)) {
          }
          return;
        }
      }
    }
  });
  OgpResult result;
  for (const auto& f : found) {
    if (!f) continue;
    result.holds = false;
    result.witness = std::make_pair(xs[f->first], xs[f->second]);
    result.witness_distance = distance(xs[f->first], xs[f->second]);
    break;
  }
  return result;
}

OgpViolation::OgpViolation(std::pair<std::uint64_t, std::uint64_t> witness, std::uint32_t distance)
    : ContractError("overlap gap violated by a pair at distance " + std::to_string(distance)),
      witness_(witness),
      distance_(distance) {}

ClusterPartition cluster(const SolutionSet& A, double nu1, double nu2,
                         const EnumerationLimits& limits) {
  const auto th = distance_thresholds(A.n, nu1, nu2);
  if (!(nu1 < nu2 / 2)) throw ParameterError("clustering needs nu1 < nu2 / 2");
  const auto ogp = detect_ogp(A, nu1, nu2, limits);
  if (!ogp.holds) throw OgpViolation(*ogp.witness, ogp.witness_distance);

  const auto& xs = A.members;
  DisjointSets sets(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (distance(xs[i], xs[j]) <= th.near) sets.unite(i, j);

  // Roots are the smallest index of each component, so iterating in member
  // order yields clusters sorted by smallest member.
  std::vector<std::size_t> slot(xs.size(), std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> label(xs.size());
  ClusterPartition P;
  P.n = A.n;
  P.nu1 = nu1;
  P.nu2 = nu2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = P.clusters.size();
      P.clusters.emplace_back();
    }
    label[i] = slot[root];
    P.clusters[label[i]].push_back(xs[i]);
  }

  // Certificates, recomputed from scratch over every pair.
  std::uint32_t intra = 0;
  std::uint32_t inter = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const auto d = distance(xs[i], xs[j]);
      if (label[i] == label[j])
        intra = std::max(intra, d);
      else
        inter = std::min(inter, d);
    }
  P.max_intra_distance = intra;
  if (P.clusters.size() >= 2) P.min_inter_distance = inter;
  if (intra > th.near)
    throw ContractError("cluster certificate failed: intra distance " + std::to_string(intra));
  if (P.min_inter_distance && *P.min_inter_distance < th.far)
    throw ContractError("cluster certificate failed: inter distance " + std::to_string(inter));
  return P;
}

ClusterStats cluster_stats(const ClusterPartition& P, double c1, double c2) {
  ClusterStats s;
  s.cluster_count = P.clusters.size();
  for (const auto& c : P.clusters) {
    s.total += c.size();
    s.max_cluster_size = std::max(s.max_cluster_size, c.size());
  }
  s.max_cluster_fraction =
      s.total == 0 ? 0.0 : static_cast<double>(s.max_cluster_size) / static_cast<double>(s.total);
  s.clusters_within_c1 = s.max_cluster_size == 0 ||
                         std::log(static_cast<double>(s.max_cluster_size)) <= c1 * P.n;
  s.total_exceeds_c2 = s.total > 0 && std::log(static_cast<double>(s.total)) >= c2 * P.n;
  return s;
}

}  // namespace satscape
