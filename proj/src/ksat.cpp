#include "satscape/ksat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "satscape/errors.hpp"
#include "satscape/rng.hpp"

namespace satscape {

VariableSet VariableSet::full(std::uint32_t n) {
  VariableSet s(n);
  for (std::uint32_t i = 0; i < n; ++i) s.insert(i);
  return s;
}

VariableSet VariableSet::from_indices(std::uint32_t n, std::span<const std::uint32_t> indices) {
  VariableSet s(n);
  for (auto i : indices) s.insert(i);
  return s;
}

void VariableSet::insert(std::uint32_t i) {
  if (i >= n_) throw ParameterError("variable index " + std::to_string(i) + " out of range");
  words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

void VariableSet::erase(std::uint32_t i) {
  if (i >= n_) throw ParameterError("variable index " + std::to_string(i) + " out of range");
  words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
}

std::uint32_t VariableSet::size() const noexcept {
  std::uint32_t count = 0;
  for (auto w : words_) count += static_cast<std::uint32_t>(std::popcount(w));
  return count;
}

std::vector<std::uint32_t> VariableSet::indices() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < n_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

VariableSet VariableSet::complement() const {
  VariableSet s(n_);
  for (std::uint32_t i = 0; i < n_; ++i)
    if (!contains(i)) s.insert(i);
  return s;
}

VariableSet VariableSet::intersect(const VariableSet& other) const {
  if (other.n_ != n_) throw ParameterError("variable sets over different universes");
  VariableSet s = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] &= other.words_[w];
  return s;
}

bool VariableSet::subset_of(const VariableSet& other) const {
  if (other.n_ != n_) throw ParameterError("variable sets over different universes");
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w] & ~other.words_[w]) return false;
  return true;
}

Assignment Assignment::from_word(std::uint32_t n, std::uint64_t bits) {
  if (n > 64) throw ParameterError("from_word supports n <= 64");
  Assignment a(n);
  if (n > 0) a.words_[0] = n == 64 ? bits : bits & ((std::uint64_t{1} << n) - 1);
  return a;
}

Assignment Assignment::from_string(std::string_view bits) {
  Assignment a(static_cast<std::uint32_t>(bits.size()));
  for (std::uint32_t i = 0; i < a.n_; ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw ParameterError("assignment string must be 0/1");
    a.set(i, bits[i] == '1');
  }
  return a;
}

void Assignment::set(std::uint32_t i, bool value) {
  if (i >= n_) throw ParameterError("assignment index out of range");
  const auto bit = std::uint64_t{1} << (i % 64);
  if (value)
    words_[i / 64] |= bit;
  else
    words_[i / 64] &= ~bit;
}

std::string Assignment::to_string() const {
  std::string s(n_, '0');
  for (std::uint32_t i = 0; i < n_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

std::string bits_to_string(std::uint64_t bits, std::uint32_t n) {
  std::string s(n, '0');
  for (std::uint32_t i = 0; i < n; ++i)
    if ((bits >> i) & 1U) s[i] = '1';
  return s;
}

Clause::Clause(std::vector<Literal> literals) : literals_(std::move(literals)) {
  if (literals_.empty()) throw ParameterError("clause must have at least one literal");
  if (literals_.size() > 64) throw ParameterError("clause width above 64 is not supported");
  std::uint64_t pattern = 0;
  for (std::size_t k = 0; k < literals_.size(); ++k) {
    if (literals_[k].negated) pattern |= std::uint64_t{1} << k;
    for (std::size_t l = 0; l < k; ++l)
      if (literals_[l].var == literals_[k].var && literals_[l].negated != literals_[k].negated)
        return;  // tautology: no falsifying pattern
  }
  violating_ = pattern;
}

bool Clause::has_repeated_variable() const noexcept {
  for (std::size_t k = 0; k < literals_.size(); ++k)
    for (std::size_t l = 0; l < k; ++l)
      if (literals_[l].var == literals_[k].var) return true;
  return false;
}

std::vector<std::uint32_t> Clause::distinct_variables() const {
  std::vector<std::uint32_t> vars;
  for (const auto& lit : literals_) vars.push_back(lit.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

bool Clause::satisfied_by_local(std::uint64_t local) const noexcept {
  for (std::size_t k = 0; k < literals_.size(); ++k)
    if (literals_[k].evaluate((local >> k) & 1U)) return true;
  return false;
}

bool Clause::satisfied_by(const Assignment& a) const {
  for (const auto& lit : literals_) {
    if (lit.var >= a.size()) throw ParameterError("assignment shorter than clause variables");
    if (lit.evaluate(a.get(lit.var))) return true;
  }
  return false;
}

std::optional<std::uint64_t> violating_assignment(const Clause& c) { return c.violating_pattern(); }

Formula::Formula(std::uint32_t n, std::uint32_t K, std::vector<Clause> clauses, std::uint64_t seed)
    : n_(n), K_(K), clauses_(std::move(clauses)), seed_(seed) {
  if (n == 0) throw ParameterError("formula needs n >= 1");
  if (K == 0) throw ParameterError("formula needs K >= 1");
  for (const auto& c : clauses_) {
    if (c.width() != K) throw ParameterError("clause width differs from K");
    for (const auto& lit : c.literals())
      if (lit.var >= n) throw ParameterError("literal variable out of range");
  }
}

std::size_t Formula::count_violations(const Assignment& a) const {
  if (a.size() != n_)
    throw ParameterError("assignment length " + std::to_string(a.size()) + " != n " +
                         std::to_string(n_));
  std::size_t count = 0;
  for (const auto& c : clauses_) {
    const auto v = c.violating_pattern();
    if (!v) continue;
    bool violated = true;
    for (std::uint32_t k = 0; k < K_ && violated; ++k)
      violated = a.get(c.literals()[k].var) == (((*v) >> k) & 1U);
    count += violated;
  }
  return count;
}

std::vector<std::uint32_t> Formula::clauses_within(const VariableSet& S) const {
  if (S.universe() != n_) throw ParameterError("variable set universe differs from n");
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < clauses_.size(); ++j) {
    const auto lits = clauses_[j].literals();
    if (std::all_of(lits.begin(), lits.end(), [&](const Literal& l) { return S.contains(l.var); }))
      out.push_back(j);
  }
  return out;
}

std::vector<std::uint32_t> Formula::clauses_containing(std::uint32_t i) const {
  if (i >= n_) throw ParameterError("variable index " + std::to_string(i) + " out of range");
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < clauses_.size(); ++j) {
    const auto lits = clauses_[j].literals();
    if (std::any_of(lits.begin(), lits.end(), [&](const Literal& l) { return l.var == i; }))
      out.push_back(j);
  }
  return out;
}

std::size_t Formula::repeated_variable_clause_count() const {
  return static_cast<std::size_t>(std::count_if(
      clauses_.begin(), clauses_.end(), [](const Clause& c) { return c.has_repeated_variable(); }));
}

std::size_t Formula::tautology_count() const {
  return static_cast<std::size_t>(std::count_if(
      clauses_.begin(), clauses_.end(), [](const Clause& c) { return c.is_tautology(); }));
}

std::vector<ClauseMask> Formula::violation_masks(std::span<const std::uint32_t> indices) const {
  if (n_ > 64) throw ParameterError("word masks need n <= 64");
  std::vector<ClauseMask> out;
  out.reserve(indices.size());
  for (auto j : indices) {
    const Clause& c = clauses_.at(j);
    const auto v = c.violating_pattern();
    if (!v) continue;
    ClauseMask cm;
    for (std::uint32_t k = 0; k < K_; ++k) {
      const auto bit = std::uint64_t{1} << c.literals()[k].var;
      cm.mask |= bit;
      if (((*v) >> k) & 1U) cm.value |= bit;
    }
    out.push_back(cm);
  }
  return out;
}

std::vector<ClauseMask> Formula::violation_masks() const {
  std::vector<std::uint32_t> all(clauses_.size());
  for (std::uint32_t j = 0; j < all.size(); ++j) all[j] = j;
  return violation_masks(all);
}

std::uint64_t Formula::variable_mask(std::size_t j) const {
  if (n_ > 64) throw ParameterError("word masks need n <= 64");
  std::uint64_t mask = 0;
  for (const auto& lit : clauses_.at(j).literals()) mask |= std::uint64_t{1} << lit.var;
  return mask;
}

std::uint64_t DensityParams::clause_count() const {
  if (!(alpha >= 0) || K == 0 || K > 62) throw ParameterError("density needs alpha >= 0, 1 <= K <= 62");
  const double m = alpha * std::ldexp(1.0, static_cast<int>(K)) * std::numbers::ln2 * n;
  return static_cast<std::uint64_t>(std::llround(m));
}

Formula generate_formula(std::uint32_t n, std::uint64_t m, std::uint32_t K, std::uint64_t seed) {
  if (n == 0) throw ParameterError("generate_formula: n must be >= 1");
  if (K == 0) throw ParameterError("generate_formula: K must be >= 1");
  Rng rng(seed);
  const std::uint64_t literal_space = 2 * std::uint64_t{n};
  std::vector<Clause> clauses;
  clauses.reserve(m);
  for (std::uint64_t j = 0; j < m; ++j) {
    std::vector<Literal> lits(K);
    for (auto& lit : lits) {
      const std::uint64_t x = rng.below(literal_space);
      lit = Literal{static_cast<std::uint32_t>(x / 2), (x % 2) == 1};
    }
    clauses.emplace_back(std::move(lits));
  }
  return Formula(n, K, std::move(clauses), seed);
}

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint32_t excluded_count(double eps, std::uint32_t n) {
  if (!(eps >= 0.0) || eps >= 1.0) throw ParameterError("eps must lie in [0, 1)");
  // eps = k/n must map back to k even when eps * n rounds just above k.
  const double scaled = eps * n;
  const double nearest = std::round(scaled);
  const double k = std::abs(scaled - nearest) <= 1e-9 * std::max(1.0, scaled) ? nearest : std::ceil(scaled);
  return static_cast<std::uint32_t>(k);
}

double eta_exact_excluding(const Formula& f, std::uint32_t excluded, std::uint64_t budget) {
  const std::uint32_t n = f.variable_count();
  if (excluded > n) throw ParameterError("cannot exclude more variables than n");
  const std::uint64_t sets = binomial(n, excluded);
  if (sets > budget)
    throw ResourceError("eta_budget=" + std::to_string(budget),
                        "eta_exact needs " + std::to_string(sets) + " excluded sets");
  if (excluded == 0 || f.clause_count() == 0) return 0.0;

  std::vector<std::vector<std::uint32_t>> incident(n);
  for (std::uint32_t j = 0; j < f.clause_count(); ++j)
    for (auto v : f.clause(j).distinct_variables()) incident[v].push_back(j);

  std::vector<std::uint64_t> stamp(f.clause_count(), 0);
  std::uint64_t epoch = 0;
  std::size_t best = 0;
  std::vector<std::uint32_t> combo(excluded);
  for (std::uint32_t t = 0; t < excluded; ++t) combo[t] = t;
  for (;;) {
    ++epoch;
    std::size_t touched = 0;
    for (auto v : combo)
      for (auto j : incident[v])
        if (stamp[j] != epoch) {
          stamp[j] = epoch;
          ++touched;
        }
    best = std::max(best, touched);
    // next combination in lexicographic order
    int t = static_cast<int>(excluded) - 1;
    while (t >= 0 && combo[t] == n - excluded + static_cast<std::uint32_t>(t)) --t;
    if (t < 0) break;
    ++combo[t];
    for (std::uint32_t u = static_cast<std::uint32_t>(t) + 1; u < excluded; ++u) combo[u] = combo[u - 1] + 1;
  }
  return static_cast<double>(best) / n;
}

double eta_exact(const Formula& f, double eps, std::uint64_t budget) {
  return eta_exact_excluding(f, excluded_count(eps, f.variable_count()), budget);
}

}  // namespace satscape
