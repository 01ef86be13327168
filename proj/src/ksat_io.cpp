#include "satscape/ksat_io.hpp"

#include <sstream>

#include "satscape/errors.hpp"
#include "satscape/io.hpp"

namespace satscape {

std::string to_dimacs(const Formula& f) {
  std::ostringstream os;
  os << "p cnf " << f.variable_count() << ' ' << f.clause_count() << '\n';
  for (const auto& c : f.clauses()) {
    for (const auto& lit : c.literals()) {
      const long long v = static_cast<long long>(lit.var) + 1;
      os << (lit.negated ? -v : v) << ' ';
    }
    os << "0\n";
  }
  return os.str();
}

Formula parse_dimacs(std::string_view text, const std::optional<FormulaMetadata>& meta) {
  std::istringstream in{std::string(text)};
  std::string line;
  long long n = -1, m = -1;
  std::vector<Clause> clauses;
  std::vector<Literal> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> n >> m) || fmt != "cnf" || n <= 0 || m < 0)
        throw ParameterError("malformed DIMACS header: " + line);
      continue;
    }
    if (n < 0) throw ParameterError("DIMACS clause before header");
    std::istringstream tokens(line);
    long long lit;
    while (tokens >> lit) {
      if (lit == 0) {
        if (current.empty()) throw ParameterError("empty DIMACS clause");
        clauses.emplace_back(std::move(current));
        current.clear();
        continue;
      }
      const long long var = (lit < 0 ? -lit : lit) - 1;
      if (var >= n) throw ParameterError("DIMACS literal out of range: " + std::to_string(lit));
      current.push_back(Literal{static_cast<std::uint32_t>(var), lit < 0});
    }
    if (tokens.fail() && !tokens.eof()) throw ParameterError("malformed DIMACS line: " + line);
  }
  if (n < 0) throw ParameterError("missing DIMACS header");
  if (!current.empty()) throw ParameterError("unterminated DIMACS clause");
  if (static_cast<long long>(clauses.size()) != m)
    throw ParameterError("DIMACS header declares " + std::to_string(m) + " clauses, found " +
                         std::to_string(clauses.size()));
  std::uint32_t K = meta ? meta->K : 0;
  if (K == 0) K = clauses.empty() ? 1 : clauses.front().width();
  return Formula(static_cast<std::uint32_t>(n), K, std::move(clauses), meta ? meta->seed : 0);
}

nlohmann::json formula_sidecar(const Formula& f, std::optional<double> alpha) {
  nlohmann::json j;
  j["schema"] = "satscape.formula.v1";
  j["n"] = f.variable_count();
  j["m"] = f.clause_count();
  j["K"] = f.width();
  j["seed"] = f.seed();
  j["alpha"] = alpha ? nlohmann::json(*alpha) : nlohmann::json(nullptr);
  j["repeated_variable_clauses"] = f.repeated_variable_clause_count();
  j["tautologies"] = f.tautology_count();
  return j;
}

FormulaMetadata parse_sidecar(const nlohmann::json& j) {
  FormulaMetadata meta;
  meta.K = j.at("K").get<std::uint32_t>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("alpha") && !j["alpha"].is_null()) meta.alpha = j["alpha"].get<double>();
  return meta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& cnf) {
  auto p = cnf;
  p.replace_extension(".json");
  return p;
}

void write_formula(const std::filesystem::path& cnf, const Formula& f, std::optional<double> alpha) {
  io::write_file(cnf, to_dimacs(f));
  io::write_file(sidecar_path(cnf), formula_sidecar(f, alpha).dump(2) + "\n");
}

Formula read_formula(const std::filesystem::path& cnf) {
  std::optional<FormulaMetadata> meta;
  const auto side = sidecar_path(cnf);
  if (side != cnf && std::filesystem::exists(side))
    meta = parse_sidecar(nlohmann::json::parse(io::read_file(side)));
  return parse_dimacs(io::read_file(cnf), meta);
}

}  // namespace satscape
