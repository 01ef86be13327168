#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satscape {

struct Literal {
  std::uint32_t var = 0;
  bool negated = false;

  /// Value of the literal under x_var = value.
  bool evaluate(bool value) const noexcept { return value != negated; }

  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Dense bitset over variable indices [0, n).
class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static VariableSet full(std::uint32_t n);
  static VariableSet from_indices(std::uint32_t n, std::span<const std::uint32_t> indices);

  std::uint32_t universe() const noexcept { return n_; }
  bool contains(std::uint32_t i) const noexcept {
    return i < n_ && ((words_[i / 64] >> (i % 64)) & 1U);
  }
  void insert(std::uint32_t i);
  void erase(std::uint32_t i);
  std::uint32_t size() const noexcept;
  std::vector<std::uint32_t> indices() const;
  VariableSet complement() const;
  VariableSet intersect(const VariableSet& other) const;
  bool subset_of(const VariableSet& other) const;

  friend bool operator==(const VariableSet&, const VariableSet&) = default;

 private:
  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Length-n bit string, packed into 64-bit words; bit i is x_i.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}

  /// Low n bits of `bits` (n <= 64).
  static Assignment from_word(std::uint32_t n, std::uint64_t bits);
  /// Parse "0110..." with character i giving x_i.
  static Assignment from_string(std::string_view bits);

  std::uint32_t size() const noexcept { return n_; }
  bool get(std::uint32_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::uint32_t i, bool value);
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  /// First word; only meaningful for n <= 64.
  std::uint64_t word() const noexcept { return words_.empty() ? 0 : words_[0]; }
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Render the low n bits of a packed assignment, x_0 first.
std::string bits_to_string(std::uint64_t bits, std::uint32_t n);

class Clause {
 public:
  explicit Clause(std::vector<Literal> literals);

  std::span<const Literal> literals() const noexcept { return literals_; }
  std::uint32_t width() const noexcept { return static_cast<std::uint32_t>(literals_.size()); }

  /// v(C): bit k is the value of literal k's variable that falsifies it.
  /// Empty for tautologies (some variable occurs with both signs).
  std::optional<std::uint64_t> violating_pattern() const noexcept { return violating_; }
  bool is_tautology() const noexcept { return !violating_.has_value(); }
  bool has_repeated_variable() const noexcept;
  /// Sorted distinct variables of the clause.
  std::vector<std::uint32_t> distinct_variables() const;

  /// Satisfaction under a local assignment to the K literal positions
  /// (bit k is the value fed to literal k).
  bool satisfied_by_local(std::uint64_t local) const noexcept;
  bool satisfied_by(const Assignment& a) const;

  friend bool operator==(const Clause& a, const Clause& b) { return a.literals_ == b.literals_; }

 private:
  std::vector<Literal> literals_;
  std::optional<std::uint64_t> violating_;
};

/// Falsifying local pattern of a clause, or nullopt for a tautology.
std::optional<std::uint64_t> violating_assignment(const Clause& c);

/// Per-clause word pair for n <= 64: the clause is violated by x iff
/// (x & mask) == value.
struct ClauseMask {
  std::uint64_t mask = 0;
  std::uint64_t value = 0;
};

class Formula {
 public:
  Formula(std::uint32_t n, std::uint32_t K, std::vector<Clause> clauses, std::uint64_t seed = 0);

  std::uint32_t variable_count() const noexcept { return n_; }
  std::uint32_t width() const noexcept { return K_; }
  std::size_t clause_count() const noexcept { return clauses_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const Clause> clauses() const noexcept { return clauses_; }
  const Clause& clause(std::size_t j) const { return clauses_.at(j); }

  std::size_t count_violations(const Assignment& a) const;
  /// Indices of clauses all of whose variables lie in S.
  std::vector<std::uint32_t> clauses_within(const VariableSet& S) const;
  /// C(x_i): indices of clauses in which variable i occurs.
  std::vector<std::uint32_t> clauses_containing(std::uint32_t i) const;
  /// Number of clauses that repeat a variable.
  std::size_t repeated_variable_clause_count() const;
  std::size_t tautology_count() const;

  /// Word pairs for the non-tautological clauses among `indices` (n <= 64).
  std::vector<ClauseMask> violation_masks(std::span<const std::uint32_t> indices) const;
  std::vector<ClauseMask> violation_masks() const;
  /// Bitmask of variables touched by clause j (n <= 64).
  std::uint64_t variable_mask(std::size_t j) const;

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  std::uint32_t n_;
  std::uint32_t K_;
  std::vector<Clause> clauses_;
  std::uint64_t seed_;
};

struct DensityParams {
  double alpha = 0;
  std::uint32_t K = 0;
  std::uint32_t n = 0;

  /// round(alpha * 2^K * ln 2 * n).
  std::uint64_t clause_count() const;
};

/// m clauses drawn i.i.d. uniformly from the (2n)^K ordered clauses.
Formula generate_formula(std::uint32_t n, std::uint64_t m, std::uint32_t K, std::uint64_t seed);

/// Exhaustive coverage deficit:
///   (1/n) * max_{|S| = n - excluded} (m - |C(S)|)
/// over every excluded set of the given size. Throws ResourceError when
/// choose(n, excluded) exceeds `budget`.
double eta_exact_excluding(const Formula& f, std::uint32_t excluded, std::uint64_t budget);

/// Number of excluded variables ceil(eps * n), robust to eps = k/n rounding.
std::uint32_t excluded_count(double eps, std::uint32_t n);

inline constexpr std::uint64_t kDefaultEtaBudget = 50'000'000;

double eta_exact(const Formula& f, double eps, std::uint64_t budget = kDefaultEtaBudget);

/// choose(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint32_t n, std::uint32_t k);

}  // namespace satscape
