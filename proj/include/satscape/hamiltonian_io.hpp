#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "satscape/hamiltonian.hpp"
#include "json.hpp"

namespace satscape {

/// Header stored next to a raw state dump.
struct StateHeader {
  std::uint32_t qubits = 0;
  std::uint64_t layout_hash = 0;
  double gamma = 0;
};

/// Raw amplitudes as little-endian (real, imag) double pairs, index order.
std::string state_bytes(const StateVector& psi);
StateVector parse_state_bytes(std::string_view bytes, std::uint32_t qubits);

nlohmann::json state_header(const QubitLayout& layout, double gamma);
StateHeader parse_state_header(const nlohmann::json& j);

/// Writes `<stem>.bin` and `<stem>.json`.
void write_state(const std::filesystem::path& stem, const QubitLayout& layout,
                 const StateVector& psi, double gamma);
StateVector read_state(const std::filesystem::path& stem, StateHeader* header = nullptr);

/// "# satscape.measurement v1" / "z,bits,violations,probability", nonzero
/// probabilities only; bits are qubit 0 first.
std::string measurement_csv(const QubitLayout& layout, std::span<const double> p);

nlohmann::json layout_summary(const QubitLayout& layout);
nlohmann::json bound_summary(const ProbabilityBoundReport& r);

}  // namespace satscape
