#pragma once

// Under-approximations by queries with at most k atoms, UCRPQ minimization,
// γ-types and the pool-based CRPQ minimizer.

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "crpq/containment.hpp"
#include "crpq/morphisms.hpp"
#include "crpq/query.hpp"

namespace crpq {

/// ρ is a refinement of disjunct `disjunct`, h: ρ → η, and α is the contraction
/// of η given by (orig, contr). Atoms of η outside the image of h are Σ*.
struct ExplicitApproximation {
  std::size_t disjunct = 0;
  Crpq rho;
  Crpq eta;
  Hom h;
  std::vector<VarId> orig;        ///< vars(α) → vars(η)
  std::vector<std::size_t> contr; ///< atoms(η) → atoms(α)
  Crpq alpha;
};

inline constexpr std::size_t kDefaultApproxBudget = 4'000'000;

/// ‖Γ‖_atoms · r_Γ · k with r_Γ the largest automaton; at least 1.
std::size_t default_refinement_length(const Ucrpq& g, std::size_t k);

/// Calls `visit` on explicit approximations of Γ with at most k atoms built
/// from m-refinements, until it returns false. Search nodes beyond `budget`
/// raise ResourceError.
void for_each_approximation(const Ucrpq& g, std::size_t k, std::size_t m,
                            const std::function<bool(const ExplicitApproximation&)>& visit,
                            std::size_t budget = kDefaultApproxBudget);

struct ApproximationStats {
  std::size_t emitted = 0;  ///< explicit approximations seen
  std::size_t distinct = 0; ///< after isomorphism dedup
  std::size_t kept = 0;     ///< after containment dedup
};

/// Δ_App(Γ, k, m): union of the α up to isomorphism. With `prune`, a disjunct
/// goes when an atom-wise language inclusion shows it inside another one, or
/// when an earlier one agrees with it both ways under bounded containment.
Ucrpq under_approximation(const Ucrpq& g, std::size_t k, std::size_t m, bool prune = true,
                          std::size_t budget = kDefaultApproxBudget, ApproximationStats* stats = nullptr);

/// Whether some α is isomorphic to δ with language-equivalent labels.
bool membership_in_app(const Crpq& delta, const Ucrpq& g, std::size_t k, std::size_t m,
                       std::size_t budget = kDefaultApproxBudget);

struct MinimizeResult {
  enum class Verdict { Minimizable, NotWithinBounds, NotMinimizable };
  Verdict verdict = Verdict::NotWithinBounds;
  Ucrpq delta;
  std::size_t m = 0;
  ContainmentVerdict check;  ///< Γ ⊑ Δ; holds the counterexample when NotMinimizable
};
std::string to_string(MinimizeResult::Verdict v);

/// Is Γ equivalent to a union of queries with at most k atoms? m defaults to
/// default_refinement_length(Γ, k). A failed check is repeated against the
/// unpruned union before NotMinimizable is reported.
MinimizeResult minimize_ucrpq(const Ucrpq& g, std::size_t k, ContainmentMode mode = ContainmentMode::Auto,
                              std::optional<std::size_t> m = std::nullopt, std::size_t max_len = 8);

// ---------------------------------------------------------------------------
// γ-types

/// Membership bits over every triple (atom, p, q) of γ, in atom-major order.
using ClassDescriptor = std::vector<bool>;

struct GammaType {
  std::set<std::vector<ClassDescriptor>> tuples;
  bool included_in(const GammaType& other) const;
};

/// The automata of γ with all their sublanguages.
class GammaContext {
 public:
  explicit GammaContext(const Crpq& gamma);
  std::size_t num_triples() const { return subs_.size(); }
  std::size_t max_parts() const { return parts_; }
  ClassDescriptor class_of(const Word& u) const;
  /// Class tuples of all factorizations into 1..max_parts() pieces (empty pieces allowed).
  GammaType type_of(const Word& u) const;
  /// Words whose class is exactly `c`; each complement is limited to `cap` subsets.
  Nfa class_automaton(const ClassDescriptor& c, std::size_t cap) const;
  std::size_t alphabet_size() const { return alphabet_size_; }

 private:
  std::vector<Nfa> subs_;
  std::size_t parts_ = 1;
  std::size_t alphabet_size_ = 0;
};

inline constexpr std::size_t kMaxTypeWord = 8;

bool gamma_equiv(const Word& u, const Word& v, const Crpq& gamma);
/// Throws ResourceError for words longer than kMaxTypeWord.
GammaType gamma_type(const Word& u, const Crpq& gamma);
inline constexpr std::size_t kClassAutomatonCap = 12;
Nfa class_automaton(const ClassDescriptor& c, const Crpq& gamma, std::size_t cap = kClassAutomatonCap);

/// L̃ restricted to the words of L up to `sample_cap` letters.
class TildeLanguage {
 public:
  TildeLanguage(const Nfa& language, const Crpq& gamma, std::size_t sample_cap);
  bool contains(const Word& z) const;
  std::size_t samples() const { return types_.size(); }

 private:
  GammaContext ctx_;
  std::vector<GammaType> types_;
};

// ---------------------------------------------------------------------------
// Pool-based CRPQ minimization

struct PoolConfig {
  std::size_t concat_cap = 2;     ///< sublanguages chained per label
  std::size_t max_len = 8;        ///< bound for non-SRE equivalence checks
  std::size_t trials = 30;        ///< random databases tried before the full check
  std::size_t max_candidates = 500'000;
  std::uint64_t seed = 0;
};

struct BruteforceResult {
  std::optional<Crpq> query;
  bool complete = false;  ///< the equivalence verdict for `query` was complete
  std::size_t pool_size = 0;
  std::size_t candidates = 0;
};

/// Label pool: sublanguages of γ's automata and their concatenations along
/// state chains, single letters and Σ*; pairwise language-inequivalent.
std::vector<LabelRef> label_pool(const Crpq& gamma, std::size_t concat_cap);

/// First query with at most k atoms over the pool that tests equivalent to γ,
/// by atom count, then edge list, then labels in pool order.
BruteforceResult minimize_crpq_bruteforce(const Crpq& gamma, std::size_t k, const PoolConfig& pool = {});

}  // namespace crpq
