#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "satscape/ksat.hpp"
#include "json.hpp"

namespace satscape {

/// Values carried next to a DIMACS file, which cannot express them.
struct FormulaMetadata {
  std::uint32_t K = 0;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
};

/// "p cnf n m" then one 0-terminated clause per line with 1-based signed
/// variable indices. Literal order and tautologies are preserved.
std::string to_dimacs(const Formula& f);

/// Parse DIMACS text. Without metadata K is taken from the clause widths
/// (which must agree) and the seed is 0.
Formula parse_dimacs(std::string_view text, const std::optional<FormulaMetadata>& meta = {});

nlohmann::json formula_sidecar(const Formula& f, std::optional<double> alpha = {});
FormulaMetadata parse_sidecar(const nlohmann::json& j);

/// Sidecar path for a DIMACS file: same stem with ".json".
std::filesystem::path sidecar_path(const std::filesystem::path& cnf);

void write_formula(const std::filesystem::path& cnf, const Formula& f,
                   std::optional<double> alpha = {});
/// Reads the DIMACS file and, if present, its sidecar.
Formula read_formula(const std::filesystem::path& cnf);

}  // namespace satscape
