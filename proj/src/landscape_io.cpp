#include "satscape/landscape_io.hpp"

#include <cmath>
#include <sstream>

namespace satscape {

std::string solutions_csv(const SolutionSet& A) {
  std::ostringstream os;
  os << "# satscape.solutions v1\nindex,assignment\n";
  for (std::size_t i = 0; i < A.members.size(); ++i)
    os << i << ',' << bits_to_string(A.members[i], A.n) << '\n';
  return os.str();
}

std::string histogram_csv(const OverlapHistogram& h) {
  std::ostringstream os;
  os << "# satscape.histogram v1\ndistance,overlap,count\n";
  for (std::size_t d = 0; d < h.counts.size(); ++d)
    os << d << ',' << (h.n - d) << ',' << h.counts[d] << '\n';
  return os.str();
}

std::string clusters_csv(const ClusterPartition& P) {
  std::ostringstream os;
  os << "# satscape.clusters v1\ncluster,assignment\n";
  for (std::size_t c = 0; c < P.clusters.size(); ++c)
    for (auto x : P.clusters[c]) os << c << ',' << bits_to_string(x, P.n) << '\n';
  return os.str();
}

nlohmann::json solution_summary(const SolutionSet& A) {
  nlohmann::json j;
  j["n"] = A.n;
  j["r"] = A.r;
  j["size"] = A.size();
  j["log_size_per_variable"] =
      A.size() == 0 ? nlohmann::json(nullptr)
                    : nlohmann::json(std::log(static_cast<double>(A.size())) / A.n);
  if (A.restriction) j["restriction"] = A.restriction->indices();
  return j;
}

nlohmann::json ogp_summary(const OgpResult& r, std::uint32_t n, double nu1, double nu2) {
  const auto th = distance_thresholds(n, nu1, nu2);
  nlohmann::json j;
  j["nu1"] = nu1;
  j["nu2"] = nu2;
  j["near_threshold"] = th.near;
  j["far_threshold"] = th.far;
  j["holds"] = r.holds;
  if (r.witness) {
    j["witness"] = {bits_to_string(r.witness->first, n), bits_to_string(r.witness->second, n)};
    j["witness_distance"] = r.witness_distance;
  }
  return j;
}

nlohmann::json cluster_summary(const ClusterPartition& P, const ClusterStats& s) {
  nlohmann::json j;
  j["nu1"] = P.nu1;
  j["nu2"] = P.nu2;
  j["cluster_count"] = s.cluster_count;
  j["max_cluster_size"] = s.max_cluster_size;
  j["total"] = s.total;
  j["max_cluster_fraction"] = s.max_cluster_fraction;
  j["clusters_within_c1"] = s.clusters_within_c1;
  j["total_exceeds_c2"] = s.total_exceeds_c2;
  j["max_intra_distance"] = P.max_intra_distance;
  j["min_inter_distance"] =
      P.min_inter_distance ? nlohmann::json(*P.min_inter_distance) : nlohmann::json(nullptr);
  std::vector<std::size_t> sizes;
  for (const auto& c : P.clusters) sizes.push_back(c.size());
  j["cluster_sizes"] = sizes;
  return j;
}

}  // namespace satscape
