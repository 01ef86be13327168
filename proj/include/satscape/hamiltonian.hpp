#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "satscape/ksat.hpp"

namespace satscape {

/// A constraint over `width` variable slots that forbids a set of local
/// patterns (bit k of a pattern is the value at slot k). A K-SAT clause
/// forbids exactly v(C); a tautology forbids nothing.
struct LocalConstraint {
  std::vector<std::uint32_t> vars;
  std::vector<std::uint64_t> forbidden;
};

/// The classical input of the quantum construction: n variables and m
/// constraints of equal width.
struct ConstraintSystem {
  std::uint32_t n = 0;
  std::uint32_t width = 0;
  std::vector<LocalConstraint> constraints;

  /// Number of constraints whose slots read a forbidden pattern (n <= 64).
  std::uint32_t violations(std::uint64_t assignment) const;
};

ConstraintSystem constraint_system(const Formula& f);

struct HamiltonianLimits {
  std::uint32_t max_qubits = 20;
};

/// Qubit (j, k) is slot k of constraint j, stored at global index j*K + k
/// and at bit (j*K + k) of a computational basis index z.
class QubitLayout {
 public:
  static QubitLayout build(const ConstraintSystem& sys, const HamiltonianLimits& limits = {});

  std::uint32_t qubit_count() const noexcept { return width_ * clause_count_; }
  std::uint32_t variable_count() const noexcept { return n_; }
  std::uint32_t clause_count() const noexcept { return clause_count_; }
  std::uint32_t width() const noexcept { return width_; }

  std::uint32_t qubit(std::uint32_t j, std::uint32_t k) const noexcept { return j * width_ + k; }
  std::uint32_t variable_of(std::uint32_t q) const { return owner_.at(q); }

  /// D(i), ascending.
  std::span<const std::uint32_t> fiber(std::uint32_t i) const { return fibers_.at(i); }
  std::uint64_t fiber_mask(std::uint32_t i) const { return fiber_masks_.at(i); }
  /// C(x_i), ascending constraint indices.
  std::span<const std::uint32_t> incidence(std::uint32_t i) const { return incidence_.at(i); }
  /// A variable is active when it owns at least one qubit.
  bool active(std::uint32_t i) const { return !fibers_.at(i).empty(); }
  std::uint32_t active_count() const noexcept;
  /// Number of qubits H_i acts on: width * |C(x_i)|.
  std::uint32_t support_size(std::uint32_t i) const;

  std::uint64_t clause_mask(std::uint32_t j) const { return clause_masks_.at(j); }
  /// Forbidden patterns of constraint j placed on its global qubits.
  std::span<const std::uint64_t> forbidden(std::uint32_t j) const { return forbidden_.at(j); }
  std::span<const std::uint32_t> clause_variables(std::uint32_t j) const { return clause_vars_.at(j); }

  /// Fiber-consistent string carrying an assignment of the variables.
  std::uint64_t embed(std::uint64_t assignment) const;
  bool consistent_on(std::uint64_t z, std::uint32_t i) const noexcept {
    const auto d = z & fiber_masks_[i];
    return d == 0 || d == fiber_masks_[i];
  }
  std::vector<std::uint32_t> all_clauses() const;
  /// Hash of the qubit-to-variable map and forbidden patterns.
  std::uint64_t fingerprint() const;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t width_ = 0;
  std::uint32_t clause_count_ = 0;
  std::vector<std::uint32_t> owner_;
  std::vector<std::vector<std::uint32_t>> fibers_;
  std::vector<std::uint64_t> fiber_masks_;
  std::vector<std::vector<std::uint32_t>> incidence_;
  std::vector<std::uint64_t> clause_masks_;
  std::vector<std::vector<std::uint64_t>> forbidden_;
  std::vector<std::vector<std::uint32_t>> clause_vars_;
};

QubitLayout build_layout(const Formula& f, const HamiltonianLimits& limits = {});

class StateVector {
 public:
  using Amplitude = std::complex<double>;

  StateVector() = default;
  explicit StateVector(std::uint32_t qubits)
      : qubits_(qubits), amplitudes_(std::size_t{1} << qubits) {}

  std::uint32_t qubit_count() const noexcept { return qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  Amplitude& operator[](std::size_t z) { return amplitudes_[z]; }
  const Amplitude& operator[](std::size_t z) const { return amplitudes_[z]; }
  std::span<Amplitude> amplitudes() noexcept { return amplitudes_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }

  double norm() const;
  /// Scales to unit norm; throws ContractError for the zero vector.
  void normalize();
  /// <this|other>
  Amplitude inner(const StateVector& other) const;

 private:
  std::uint32_t qubits_ = 0;
  std::vector<Amplitude> amplitudes_;
};

/// |CAT> = tensor over active variables of (|0..0> + |1..1>)/sqrt(2) on D(i).
StateVector cat_state(const QubitLayout& layout);

/// Number of constraints in `clauses` whose own qubits read a forbidden pattern.
std::uint32_t violated_count(const QubitLayout& layout, std::uint64_t z,
                             std::span<const std::uint32_t> clauses);

/// Diagonal map z -> gamma^(sign * v_J(z)) for the product of Q_{C_j,gamma}
/// over j in J; sign = -1 applies the inverse.
StateVector apply_q_gamma(const QubitLayout& layout, StateVector psi, double gamma, int sign,
                          std::span<const std::uint32_t> clauses);
StateVector apply_q_gamma(const QubitLayout& layout, StateVector psi, double gamma, int sign);

/// (I - |CAT(i)><CAT(i)|) acting on D(i).
StateVector apply_cat_complement(const QubitLayout& layout, StateVector psi, std::uint32_t i);

/// H_i = Q_{x_i}^{-1} (I - |CAT(i)><CAT(i)|) Q_{x_i}^{-1}.
StateVector apply_h_i(const QubitLayout& layout, StateVector psi, std::uint32_t i, double gamma);

/// <psi|H_i|psi>
double local_energy(const QubitLayout& layout, const StateVector& psi, std::uint32_t i,
                    double gamma);
double total_energy(const QubitLayout& layout, const StateVector& psi, double gamma);

/// Normalized Q(gamma)|CAT>.
StateVector ground_state(const QubitLayout& layout, double gamma);

/// |<z|psi>|^2 for every z; psi must have unit norm within 1e-12.
std::vector<double> measurement_distribution(const StateVector& psi);

/// One factor (|sigma> +/- |sigma-bar>)/sqrt(2) on D(i). Bit t of `pattern`
/// is the value on the t-th qubit of D(i); bit 0 is always 0 so that sigma
/// precedes its complement lexicographically.
struct LocalFactor {
  std::uint64_t pattern = 0;
  bool minus = false;

  bool is_cat() const noexcept { return pattern == 0 && !minus; }
  friend bool operator==(const LocalFactor&, const LocalFactor&) = default;
};

/// Element of the product basis: one local factor per variable. Factors of
/// inactive variables must be CAT (the empty fiber has a single state).
struct BasisElement {
  std::vector<LocalFactor> factors;

  static BasisElement cat(std::uint32_t n) { return {std::vector<LocalFactor>(n)}; }
  friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

/// Basis elements are indexed by 2^(Km) integers: within D(i), the first
/// qubit's bit is the sign and the remaining bits are sigma. Index 0 is |CAT>.
std::uint64_t basis_index(const QubitLayout& layout, const BasisElement& w);
BasisElement basis_element_at(const QubitLayout& layout, std::uint64_t index);
bool factor_is_cat(const QubitLayout& layout, std::uint64_t index, std::uint32_t i);

/// (1/sqrt 2)^n_active * sum_{z in B(w)} (-1)^R(w,z) |z>.
StateVector basis_element_vector(const QubitLayout& layout, const BasisElement& w);

/// <w|psi> for every basis element, indexed by basis_index.
std::vector<std::complex<double>> expand_in_basis(const QubitLayout& layout,
                                                  const StateVector& psi);

/// log2 |W(S)|: qubits in fibers of variables outside S.
std::uint32_t log2_basis_count(const QubitLayout& layout, const VariableSet& S);

/// Normalized Q(gamma)|w> where w takes CAT factors on S and `choice`'s
/// factors elsewhere. Throws ContractError unless H_i annihilates the result
/// for every i in S.
StateVector near_ground_state(const QubitLayout& layout, double gamma, const VariableSet& S,
                              const BasisElement& choice);

struct ViolationLevel {
  std::uint32_t r = 0;
  std::uint64_t strings = 0;
  double max_probability = 0;
  double bound = 0;
};

struct ProbabilityBoundReport {
  double eta = 0;
  std::uint64_t consistent_strings = 0;  // |S-bar|
  std::uint64_t satisfying_strings = 0;  // |S-bar(0)|
  bool vacuous = false;
  std::uint64_t checked = 0;
  std::uint64_t bound_violations = 0;
  /// max over z of |<psi|z>|^2 / bound
  double max_ratio = 0;
  std::uint64_t sandwich_violations = 0;
  /// Strings outside S-bar carrying a nonzero amplitude.
  std::uint64_t outside_support_nonzero = 0;
  std::uint32_t log2_w_size = 0;
  double log2_w_bound = 0;
  std::vector<ViolationLevel> levels;

  bool passed() const noexcept {
    return bound_violations == 0 && sandwich_violations == 0 && outside_support_nonzero == 0 &&
           log2_w_size <= log2_w_bound + 1e-9;
  }
};

/// Checks, for every z in S-bar(r),
///   |<psi|z>|^2 <= gamma^(2r) (2/gamma)^(3 K eta n) / |S-bar(0)|
/// and gamma^(r + eta n) |<phi|z>| <= |<psi|z>| <= gamma^r |<phi|z>| with
/// phi = Q(gamma)^{-1} psi.
ProbabilityBoundReport check_probability_bound(const QubitLayout& layout, double gamma,
                                               const VariableSet& S, const StateVector& psi,
                                               double eta);

}  // namespace satscape
