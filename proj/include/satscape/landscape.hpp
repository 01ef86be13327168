#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "satscape/errors.hpp"
#include "satscape/ksat.hpp"

namespace satscape {

struct EnumerationLimits {
  /// Largest n accepted by exhaustive enumeration.
  std::uint32_t max_variables = 30;
  /// Cap on choose(n, ceil(eps n)) * 2^n for the eps-union.
  std::uint64_t eps_budget = std::uint64_t{1} << 36;
  /// Cap on |A| for pairwise distance work.
  std::size_t max_pair_set = std::size_t{1} << 20;
  std::size_t workers = 1;
};

/// Assignments of n <= 64 variables as packed words (bit i is x_i),
/// sorted and duplicate-free.
struct SolutionSet {
  std::uint32_t n = 0;
  std::uint32_t r = 0;
  std::vector<std::uint64_t> members;
  std::optional<VariableSet> restriction;

  static SolutionSet from_members(std::uint32_t n, std::vector<std::uint64_t> members);

  std::size_t size() const noexcept { return members.size(); }
  bool contains(std::uint64_t x) const;
};

/// SAT(Phi(C(S), r)): every x in {0,1}^n violating at most r clauses of C(S)
/// (all clauses when S is absent).
SolutionSet enumerate_sat(const Formula& f, std::uint32_t r,
                          const std::optional<VariableSet>& S = std::nullopt,
                          const EnumerationLimits& limits = {});

/// Union of enumerate_sat(f, r, S) over all S with |S| = n - ceil(eps n).
SolutionSet enumerate_sat_eps(const Formula& f, double eps, std::uint32_t r,
                              const EnumerationLimits& limits = {});

/// counts[d] = number of unordered member pairs at Hamming distance d.
struct OverlapHistogram {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t total_pairs() const noexcept;
};

OverlapHistogram overlap_histogram(const SolutionSet& A, const EnumerationLimits& limits = {});

/// Integer distance thresholds: "near" is d <= floor(nu1 n), "far" is
/// d >= ceil(nu2 n).
struct DistanceThresholds {
  std::uint32_t near = 0;
  std::uint32_t far = 0;
};

DistanceThresholds distance_thresholds(std::uint32_t n, double nu1, double nu2);

struct OgpResult {
  bool holds = true;
  /// First violating pair in (row, column) member order.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  std::uint32_t witness_distance = 0;
};

OgpResult detect_ogp(const SolutionSet& A, double nu1, double nu2,
                     const EnumerationLimits& limits = {});

/// Raised by cluster() when the set has a pair strictly inside the gap.
class OgpViolation : public ContractError {
 public:
  OgpViolation(std::pair<std::uint64_t, std::uint64_t> witness, std::uint32_t distance);

  std::pair<std::uint64_t, std::uint64_t> witness() const noexcept { return witness_; }
  std::uint32_t distance() const noexcept { return distance_; }

 private:
  std::pair<std::uint64_t, std::uint64_t> witness_;
  std::uint32_t distance_;
};

struct ClusterPartition {
  std::uint32_t n = 0;
  double nu1 = 0;
  double nu2 = 0;
  /// Each cluster sorted; clusters ordered by their smallest member.
  std::vector<std::vector<std::uint64_t>> clusters;
  std::uint32_t max_intra_distance = 0;
  /// Absent when there are fewer than two clusters.
  std::optional<std::uint32_t> min_inter_distance;
};

/// The unique (nu1, nu2)-clustering: connected components of the relation
/// d <= floor(nu1 n). Requires the OGP on A and nu1 < nu2 / 2.
ClusterPartition cluster(const SolutionSet& A, double nu1, double nu2,
                         const EnumerationLimits& limits = {});

struct ClusterStats {
  std::size_t cluster_count = 0;
  std::size_t max_cluster_size = 0;
  std::size_t total = 0;
  double max_cluster_fraction = 0;
  /// max cluster size <= exp(c1 n)
  bool clusters_within_c1 = false;
  /// total size >= exp(c2 n)
  bool total_exceeds_c2 = false;
};

ClusterStats cluster_stats(const ClusterPartition& P, double c1, double c2);

}  // namespace satscape
