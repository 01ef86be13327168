#include "satscape/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "satscape/errors.hpp"
#include "satscape/io.hpp"

namespace satscape {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Places bit t of `local` on qubit fiber[t].
std::uint64_t scatter(std::span<const std::uint32_t> fiber, std::uint64_t local) {
  std::uint64_t z = 0;
  for (std::size_t t = 0; t < fiber.size(); ++t)
    if ((local >> t) & 1U) z |= std::uint64_t{1} << fiber[t];
  return z;
}

std::uint64_t gather(std::span<const std::uint32_t> fiber, std::uint64_t z) {
  std::uint64_t local = 0;
  for (std::size_t t = 0; t < fiber.size(); ++t)
    if ((z >> fiber[t]) & 1U) local |= std::uint64_t{1} << t;
  return local;
}

void check_gamma(double gamma, int sign, std::size_t max_count) {
  if (sign != 1 && sign != -1) throw ParameterError("Q(gamma) exponent sign must be +1 or -1");
  if (!(gamma >= 0.0) || gamma > 1.0) throw ParameterError("gamma must lie in [0, 1]");
  if (gamma == 0.0 && sign == -1) throw ParameterError("Q(0) is not invertible");
  // gamma^(-count) must stay representable.
  if (gamma > 0.0 && static_cast<double>(max_count) * -std::log(gamma) > 600.0)
    throw ParameterError("gamma too small for this many constraints (under/overflow)");
}

void check_same_size(const QubitLayout& layout, const StateVector& psi) {
  if (psi.qubit_count() != layout.qubit_count())
    throw ParameterError("state has " + std::to_string(psi.qubit_count()) + " qubits, layout " +
                         std::to_string(layout.qubit_count()));
}

void check_factor(const QubitLayout& layout, std::uint32_t i, const LocalFactor& f) {
  const auto size = layout.fiber(i).size();
  if (size == 0) {
    if (!f.is_cat()) throw ParameterError("inactive variable must carry the CAT factor");
    return;
  }
  if (f.pattern & 1U) throw ParameterError("local pattern must start with 0 (lexicographic rep)");
  if (size < 64 && (f.pattern >> size)) throw ParameterError("local pattern wider than fiber");
}

}  // namespace

std::uint32_t ConstraintSystem::violations(std::uint64_t assignment) const {
  std::uint32_t count = 0;
  for (const auto& c : constraints) {
    std::uint64_t local = 0;
    for (std::size_t k = 0; k < c.vars.size(); ++k)
      if ((assignment >> c.vars[k]) & 1U) local |= std::uint64_t{1} << k;
    count += std::find(c.forbidden.begin(), c.forbidden.end(), local) != c.forbidden.end();
  }
  return count;
}

ConstraintSystem constraint_system(const Formula& f) {
  ConstraintSystem sys;
  sys.n = f.variable_count();
  sys.width = f.width();
  for (const auto& c : f.clauses()) {
    LocalConstraint lc;
    for (const auto& lit : c.literals()) lc.vars.push_back(lit.var);
    if (auto v = c.violating_pattern()) lc.forbidden.push_back(*v);
    sys.constraints.push_back(std::move(lc));
  }
  return sys;
}

QubitLayout QubitLayout::build(const ConstraintSystem& sys, const HamiltonianLimits& limits) {
  const std::uint64_t qubits = std::uint64_t{sys.width} * sys.constraints.size();
  if (qubits > limits.max_qubits || qubits > 62)
    throw ResourceError("max_qubits=" + std::to_string(limits.max_qubits),
                        "layout needs " + std::to_string(qubits) + " qubits");
  if (sys.n == 0) throw ParameterError("constraint system needs n >= 1");
  QubitLayout L;
  L.n_ = sys.n;
  L.width_ = sys.width;
  L.clause_count_ = static_cast<std::uint32_t>(sys.constraints.size());
  L.owner_.resize(qubits);
  L.fibers_.resize(sys.n);
  L.fiber_masks_.assign(sys.n, 0);
  L.incidence_.resize(sys.n);
  for (std::uint32_t j = 0; j < L.clause_count_; ++j) {
    const auto& c = sys.constraints[j];
    if (c.vars.size() != sys.width) throw ParameterError("constraint width differs from system width");
    std::uint64_t cmask = 0;
    for (std::uint32_t k = 0; k < sys.width; ++k) {
      const auto v = c.vars[k];
      if (v >= sys.n) throw ParameterError("constraint variable out of range");
      const auto q = L.qubit(j, k);
      L.owner_[q] = v;
      L.fibers_[v].push_back(q);
      L.fiber_masks_[v] |= std::uint64_t{1} << q;
      cmask |= std::uint64_t{1} << q;
      if (L.incidence_[v].empty() || L.incidence_[v].back() != j) L.incidence_[v].push_back(j);
    }
    L.clause_masks_.push_back(cmask);
    std::vector<std::uint64_t> patterns;
    for (auto p : c.forbidden) {
      if (sys.width < 64 && (p >> sys.width)) throw ParameterError("forbidden pattern wider than constraint");
      patterns.push_back(p << (j * sys.width));
    }
    L.forbidden_.push_back(std::move(patterns));
    L.clause_vars_.push_back(c.vars);
  }
  return L;
}

QubitLayout build_layout(const Formula& f, const HamiltonianLimits& limits) {
  return QubitLayout::build(constraint_system(f), limits);
}

std::uint32_t QubitLayout::active_count() const noexcept {
  return static_cast<std::uint32_t>(
      std::count_if(fibers_.begin(), fibers_.end(), [](const auto& d) { return !d.empty(); }));
}

std::uint32_t QubitLayout::support_size(std::uint32_t i) const {
  return width_ * static_cast<std::uint32_t>(incidence_.at(i).size());
}

std::uint64_t QubitLayout::embed(std::uint64_t assignment) const {
  std::uint64_t z = 0;
  for (std::uint32_t i = 0; i < n_; ++i)
    if ((assignment >> i) & 1U) z |= fiber_masks_[i];
  return z;
}

std::vector<std::uint32_t> QubitLayout::all_clauses() const {
  std::vector<std::uint32_t> out(clause_count_);
  for (std::uint32_t j = 0; j < clause_count_; ++j) out[j] = j;
  return out;
}

std::uint64_t QubitLayout::fingerprint() const {
  std::string bytes;
  auto put = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
  };
  put(n_);
  put(width_);
  put(clause_count_);
  for (auto o : owner_) put(o);
  for (const auto& f : forbidden_) {
    put(f.size());
    for (auto p : f) put(p);
  }
  return io::fnv1a64(bytes);
}

double StateVector::norm() const {
  double s = 0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw ContractError("cannot normalize a zero or non-finite state");
  for (auto& a : amplitudes_) a /= nrm;
}

StateVector::Amplitude StateVector::inner(const StateVector& other) const {
  if (other.dimension() != dimension()) throw ParameterError("inner product of mismatched states");
  Amplitude s = 0;
  for (std::size_t z = 0; z < amplitudes_.size(); ++z) s += std::conj(amplitudes_[z]) * other.amplitudes_[z];
  return s;
}

StateVector cat_state(const QubitLayout& layout) {
  return basis_element_vector(layout, BasisElement::cat(layout.variable_count()));
}

std::uint32_t violated_count(const QubitLayout& layout, std::uint64_t z,
                             std::span<const std::uint32_t> clauses) {
  std::uint32_t count = 0;
  for (auto j : clauses) {
    const auto local = z & layout.clause_mask(j);
    for (auto p : layout.forbidden(j))
      if (local == p) {
        ++count;
        break;
      }
  }
  return count;
}

StateVector apply_q_gamma(const QubitLayout& layout, StateVector psi, double gamma, int sign,
                          std::span<const std::uint32_t> clauses) {
  check_same_size(layout, psi);
  check_gamma(gamma, sign, clauses.size());
  // Integer violation counts, exponentiated once through a table.
  std::vector<double> factor(clauses.size() + 1);
  for (std::size_t c = 0; c < factor.size(); ++c)
    factor[c] = c == 0 ? 1.0 : std::pow(gamma, sign * static_cast<double>(c));
  for (std::size_t z = 0; z < psi.dimension(); ++z) {
    const auto v = violated_count(layout, z, clauses);
    if (v) psi[z] *= factor[v];
  }
  return psi;
}

StateVector apply_q_gamma(const QubitLayout& layout, StateVector psi, double gamma, int sign) {
  return apply_q_gamma(layout, std::move(psi), gamma, sign, layout.all_clauses());
}

StateVector apply_cat_complement(const QubitLayout& layout, StateVector psi, std::uint32_t i) {
  check_same_size(layout, psi);
  if (i >= layout.variable_count()) throw ParameterError("variable index out of range");
  const std::uint64_t D = layout.fiber_mask(i);
  if (D == 0) {  // |CAT(i)><CAT(i)| is the identity on an empty fiber
    std::fill(psi.amplitudes().begin(), psi.amplitudes().end(), StateVector::Amplitude{0});
    return psi;
  }
  // Rank-one projector per configuration of the other qubits: reduce the
  // (0..0, 1..1) pair to its mean, then subtract.
  for (std::size_t z = 0; z < psi.dimension(); ++z) {
    if (z & D) continue;
    const auto a0 = psi[z];
    const auto a1 = psi[z | D];
    const auto mean = 0.5 * (a0 + a1);
    psi[z] = a0 - mean;
    psi[z | D] = a1 - mean;
  }
  return psi;
}

StateVector apply_h_i(const QubitLayout& layout, StateVector psi, std::uint32_t i, double gamma) {
  if (i >= layout.variable_count()) throw ParameterError("variable index out of range");
  const auto J = layout.incidence(i);
  psi = apply_q_gamma(layout, std::move(psi), gamma, -1, J);
  psi = apply_cat_complement(layout, std::move(psi), i);
  return apply_q_gamma(layout, std::move(psi), gamma, -1, J);
}

double local_energy(const QubitLayout& layout, const StateVector& psi, std::uint32_t i,
                    double gamma) {
  // H_i = A^dagger (I - P) A with A = Q_{x_i}^{-1} Hermitian, so the form is ||(I-P) A psi||^2.
  auto v = apply_q_gamma(layout, psi, gamma, -1, layout.incidence(i));
  v = apply_cat_complement(layout, std::move(v), i);
  const double nrm = v.norm();
  return nrm * nrm;
}

double total_energy(const QubitLayout& layout, const StateVector& psi, double gamma) {
  double e = 0;
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i) e += local_energy(layout, psi, i, gamma);
  return e;
}

StateVector ground_state(const QubitLayout& layout, double gamma) {
  auto psi = apply_q_gamma(layout, cat_state(layout), gamma, +1);
  psi.normalize();
  return psi;
}

std::vector<double> measurement_distribution(const StateVector& psi) {
  std::vector<double> p(psi.dimension());
  double total = 0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    p[z] = std::norm(psi[z]);
    total += p[z];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ContractError("measurement needs a unit-norm state (norm^2 = " + io::format_double(total) + ")");
  return p;
}

std::uint64_t basis_index(const QubitLayout& layout, const BasisElement& w) {
  if (w.factors.size() != layout.variable_count()) throw ParameterError("basis element has wrong arity");
  std::uint64_t index = 0;
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i) {
    const auto& f = w.factors[i];
    check_factor(layout, i, f);
    if (!layout.active(i)) continue;
    index |= scatter(layout.fiber(i), f.pattern | (f.minus ? 1U : 0U));
  }
  return index;
}

BasisElement basis_element_at(const QubitLayout& layout, std::uint64_t index) {
  BasisElement w = BasisElement::cat(layout.variable_count());
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i) {
    if (!layout.active(i)) continue;
    const auto local = gather(layout.fiber(i), index);
    w.factors[i] = LocalFactor{local & ~std::uint64_t{1}, (local & 1U) != 0};
  }
  return w;
}

bool factor_is_cat(const QubitLayout& layout, std::uint64_t index, std::uint32_t i) {
  return (index & layout.fiber_mask(i)) == 0;
}

StateVector basis_element_vector(const QubitLayout& layout, const BasisElement& w) {
  if (w.factors.size() != layout.variable_count()) throw ParameterError("basis element has wrong arity");
  std::vector<std::uint32_t> act;
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i) {
    check_factor(layout, i, w.factors[i]);
    if (layout.active(i)) act.push_back(i);
  }
  StateVector psi(layout.qubit_count());
  const double amp = std::pow(kInvSqrt2, static_cast<double>(act.size()));
  // choice bit b_t selects sigma-bar for the t-th active variable
  const std::uint64_t choices = std::uint64_t{1} << act.size();
  for (std::uint64_t b = 0; b < choices; ++b) {
    std::uint64_t z = 0;
    int minus = 0;
    for (std::size_t t = 0; t < act.size(); ++t) {
      const auto i = act[t];
      const auto& f = w.factors[i];
      std::uint64_t part = scatter(layout.fiber(i), f.pattern);
      if ((b >> t) & 1U) {
        part ^= layout.fiber_mask(i);
        minus += f.minus;
      }
      z |= part;
    }
    psi[z] = (minus % 2) ? -amp : amp;
  }
  return psi;
}

std::vector<std::complex<double>> expand_in_basis(const QubitLayout& layout, const StateVector& psi) {
  check_same_size(layout, psi);
  std::vector<std::complex<double>> cur(psi.amplitudes().begin(), psi.amplitudes().end());
  std::vector<std::complex<double>> next(cur.size());
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i) {
    if (!layout.active(i)) continue;
    const std::uint64_t D = layout.fiber_mask(i);
    const std::uint64_t first = std::uint64_t{1} << layout.fiber(i).front();
    for (std::size_t z = 0; z < cur.size(); ++z) {
      if (z & first) continue;
      const auto a = cur[z];
      const auto b = cur[z ^ D];
      next[z] = kInvSqrt2 * (a + b);
      next[z | first] = kInvSqrt2 * (a - b);
    }
    cur.swap(next);
  }
  return cur;
}

std::uint32_t log2_basis_count(const QubitLayout& layout, const VariableSet& S) {
  if (S.universe() != layout.variable_count()) throw ParameterError("variable set universe mismatch");
  std::uint32_t bits = 0;
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i)
    if (!S.contains(i)) bits += static_cast<std::uint32_t>(layout.fiber(i).size());
  return bits;
}

StateVector near_ground_state(const QubitLayout& layout, double gamma, const VariableSet& S,
                              const BasisElement& choice) {
  if (S.universe() != layout.variable_count()) throw ParameterError("variable set universe mismatch");
  if (choice.factors.size() != layout.variable_count()) throw ParameterError("basis element has wrong arity");
  BasisElement w = choice;
  for (std::uint32_t i = 0; i < layout.variable_count(); ++i)
    if (S.contains(i)) w.factors[i] = LocalFactor{};
  auto psi = apply_q_gamma(layout, basis_element_vector(layout, w), gamma, +1);
  psi.normalize();
  for (auto i : S.indices()) {
    const auto h = apply_h_i(layout, psi, i, gamma);
    const double scale = std::pow(gamma, -2.0 * static_cast<double>(layout.incidence(i).size()));
    if (h.norm() > 1e-10 * scale)
      throw ContractError("H_" + std::to_string(i) + " does not annihilate the constructed state");
  }
  return psi;
}

ProbabilityBoundReport check_probability_bound(const QubitLayout& layout, double gamma,
                                               const VariableSet& S, const StateVector& psi,
                                               double eta) {
  check_same_size(layout, psi);
  if (S.universe() != layout.variable_count()) throw ParameterError("variable set universe mismatch");
  if (!(gamma > 0.0) || gamma > 1.0) throw ParameterError("gamma must lie in (0, 1]");
  const auto n = layout.variable_count();
  const double eta_n = eta * n;

  std::uint64_t in_S_mask = 0;
  std::vector<std::uint32_t> inside;  // C(S): constraints entirely on S variables
  for (std::uint32_t i = 0; i < n; ++i)
    if (S.contains(i)) in_S_mask |= layout.fiber_mask(i);
  for (std::uint32_t j = 0; j < layout.clause_count(); ++j) {
    const auto vars = layout.clause_variables(j);
    if (std::all_of(vars.begin(), vars.end(), [&](std::uint32_t v) { return S.contains(v); }))
      inside.push_back(j);
  }
  const auto S_vars = S.indices();
  auto consistent = [&](std::uint64_t z) {
    return std::all_of(S_vars.begin(), S_vars.end(),
                       [&](std::uint32_t i) { return layout.consistent_on(z, i); });
  };

  const auto phi = apply_q_gamma(layout, psi, gamma, -1);

  ProbabilityBoundReport rep;
  rep.eta = eta;
  rep.log2_w_size = log2_basis_count(layout, S);
  rep.log2_w_bound = static_cast<double>(n) * layout.width() * eta;

  std::vector<std::uint32_t> level(psi.dimension(), 0);
  std::vector<char> member(psi.dimension(), 0);
  for (std::size_t z = 0; z < psi.dimension(); ++z) {
    if (!consistent(z)) {
      if (psi[z] != StateVector::Amplitude{0}) ++rep.outside_support_nonzero;
      continue;
    }
    member[z] = 1;
    ++rep.consistent_strings;
    level[z] = violated_count(layout, z, inside);
    if (level[z] == 0) ++rep.satisfying_strings;
  }
  if (rep.satisfying_strings == 0) {
    rep.vacuous = true;
    return rep;
  }

  const double log_gamma = std::log(gamma);
  const double log_base = 3.0 * layout.width() * eta_n * std::log(2.0 / gamma) -
                          std::log(static_cast<double>(rep.satisfying_strings));
  constexpr double rel = 1e-12;
  for (std::size_t z = 0; z < psi.dimension(); ++z) {
    if (!member[z]) continue;
    const auto r = level[z];
    const double p = std::norm(psi[z]);
    const double log_bound = 2.0 * r * log_gamma + log_base;
    ++rep.checked;
    if (rep.levels.size() <= r) {
      for (auto t = static_cast<std::uint32_t>(rep.levels.size()); t <= r; ++t)
        rep.levels.push_back(ViolationLevel{t, 0, 0.0, std::exp(2.0 * t * log_gamma + log_base)});
    }
    auto& lv = rep.levels[r];
    ++lv.strings;
    lv.max_probability = std::max(lv.max_probability, p);
    if (p > 0) {
      const double ratio = std::exp(std::log(p) - log_bound);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > 1.0 + rel) ++rep.bound_violations;
    }
    const double a_psi = std::abs(psi[z]);
    const double a_phi = std::abs(phi[z]);
    const double upper = std::pow(gamma, static_cast<double>(r)) * a_phi;
    const double lower = std::pow(gamma, r + eta_n) * a_phi;
    if (a_psi > upper * (1 + rel) || a_psi < lower * (1 - rel)) ++rep.sandwich_violations;
  }
  return rep;
}

}  // namespace satscape
