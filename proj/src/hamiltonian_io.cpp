#include "satscape/hamiltonian_io.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "satscape/errors.hpp"
#include "satscape/io.hpp"

namespace satscape {
namespace {

void put_double(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

double get_double(std::string_view in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= std::uint64_t{static_cast<unsigned char>(in[offset + b])} << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string state_bytes(const StateVector& psi) {
  std::string out;
  out.reserve(psi.dimension() * 16);
  for (const auto& a : psi.amplitudes()) {
    put_double(out, a.real());
    put_double(out, a.imag());
  }
  return out;
}

StateVector parse_state_bytes(std::string_view bytes, std::uint32_t qubits) {
  if (qubits > 40) throw ParameterError("state dump claims too many qubits");
  StateVector psi(qubits);
  if (bytes.size() != psi.dimension() * 16)
    throw ParameterError("state dump has " + std::to_string(bytes.size()) + " bytes, expected " +
                         std::to_string(psi.dimension() * 16));
  for (std::size_t z = 0; z < psi.dimension(); ++z)
    psi[z] = {get_double(bytes, 16 * z), get_double(bytes, 16 * z + 8)};
  return psi;
}

nlohmann::json state_header(const QubitLayout& layout, double gamma) {
  return {{"schema", "satscape.state.v1"},
          {"qubits", layout.qubit_count()},
          {"variables", layout.variable_count()},
          {"clauses", layout.clause_count()},
          {"K", layout.width()},
          {"layout_hash", io::hex64(layout.fingerprint())},
          {"gamma", gamma},
          {"encoding", "complex128 little-endian, basis index order, bit q = qubit q"}};
}

StateHeader parse_state_header(const nlohmann::json& j) {
  if (j.value("schema", "") != "satscape.state.v1") throw ParameterError("not a satscape state header");
  StateHeader h;
  h.qubits = j.at("qubits").get<std::uint32_t>();
  h.layout_hash = std::stoull(j.at("layout_hash").get<std::string>(), nullptr, 16);
  h.gamma = j.at("gamma").get<double>();
  return h;
}

void write_state(const std::filesystem::path& stem, const QubitLayout& layout,
                 const StateVector& psi, double gamma) {
  auto bin = stem;
  bin += ".bin";
  auto hdr = stem;
  hdr += ".json";
  io::write_file(bin, state_bytes(psi));
  io::write_file(hdr, state_header(layout, gamma).dump(2) + "\n");
}

StateVector read_state(const std::filesystem::path& stem, StateHeader* header) {
  auto bin = stem;
  bin += ".bin";
  auto hdr = stem;
  hdr += ".json";
  const auto h = parse_state_header(nlohmann::json::parse(io::read_file(hdr)));
  if (header) *header = h;
  return parse_state_bytes(io::read_file(bin), h.qubits);
}

std::string measurement_csv(const QubitLayout& layout, std::span<const double> p) {
  std::ostringstream os;
  os << "# satscape.measurement v1\nz,bits,violations,probability\n";
  const auto all = layout.all_clauses();
  for (std::size_t z = 0; z < p.size(); ++z) {
    if (p[z] == 0.0) continue;
    os << z << ',' << bits_to_string(z, layout.qubit_count()) << ','
       << violated_count(layout, z, all) << ',' << io::format_double(p[z]) << '\n';
  }
  return os.str();
}

nlohmann::json layout_summary(const QubitLayout& layout) {
  nlohmann::json vars = nlohmann::json::array();
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i)
    vars.push_back({{"variable", i},
                    {"fiber", std::vector<std::uint32_t>(layout.fiber(i).begin(), layout.fiber(i).end())},
                    {"clauses", std::vector<std::uint32_t>(layout.incidence(i).begin(),
                                                           layout.incidence(i).end())},
                    {"support", layout.support_size(i)}});
  return {{"qubits", layout.qubit_count()},
          {"active_variables", layout.active_count()},
          {"layout_hash", io::hex64(layout.fingerprint())},
          {"variables", vars}};
}

nlohmann::json bound_summary(const ProbabilityBoundReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"r", l.r},
                      {"strings", l.strings},
                      {"max_probability", l.max_probability},
                      {"bound", l.bound}});
  return {{"eta", r.eta},
          {"consistent_strings", r.consistent_strings},
          {"satisfying_strings", r.satisfying_strings},
          {"vacuous", r.vacuous},
          {"checked", r.checked},
          {"bound_violations", r.bound_violations},
          {"max_ratio", r.max_ratio},
          {"sandwich_violations", r.sandwich_violations},
          {"outside_support_nonzero", r.outside_support_nonzero},
          {"log2_w_size", r.log2_w_size},
          {"log2_w_bound", r.log2_w_bound},
          {"passed", r.passed()},
          {"levels", levels}};
}

}  // namespace satscape
