#pragma once

#include <string>

#include "satscape/landscape.hpp"
#include "json.hpp"

namespace satscape {

// CSV layouts. The first line names the schema and version.
//   solutions:  "# satscape.solutions v1" / "index,assignment"
//   histogram:  "# satscape.histogram v1" / "distance,overlap,count"
//   clusters:   "# satscape.clusters v1"  / "cluster,assignment"
// Assignments are written x_0 first.

std::string solutions_csv(const SolutionSet& A);
std::string histogram_csv(const OverlapHistogram& h);
std::string clusters_csv(const ClusterPartition& P);

nlohmann::json solution_summary(const SolutionSet& A);
nlohmann::json ogp_summary(const OgpResult& r, std::uint32_t n, double nu1, double nu2);
nlohmann::json cluster_summary(const ClusterPartition& P, const ClusterStats& s);

}  // namespace satscape
