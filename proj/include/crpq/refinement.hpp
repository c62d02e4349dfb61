#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "crpq/evaluation.hpp"
#include "crpq/query.hpp"

namespace crpq {

/// One step of a chain refinement: the sublanguage A⟨from,to⟩ or a single letter of it.
struct ChainStep {
  State from = 0;
  State to = 0;
  std::optional<Symbol> letter;
  LabelRef label;
};

struct AtomRefinement {
  std::size_t atom = 0;
  bool equality = false;      ///< collapse x = y
  std::vector<ChainStep> steps;  ///< empty iff equality
};

/// All atom m-refinements of atom `i` of `q`: equality first when ε ∈ L, then
/// chains by length, state sequence and option (sublanguage before letters).
/// Chains through an empty sublanguage are skipped; duplicates (same resolved
/// steps) are dropped.
std::vector<AtomRefinement> atom_refinements(const Crpq& q, std::size_t i, std::size_t m);

/// Applies one refinement per atom. Fresh variables are named t{atom}_{i};
/// equality collapses merge endpoints (a merged variable stays an output).
Crpq apply_refinements(const Crpq& q, const std::vector<AtomRefinement>& choice);

/// Calls `visit` on every m-refinement of `q` until it returns false.
void for_each_refinement(const Crpq& q, std::size_t m, const std::function<bool(const Crpq&)>& visit);

struct Expansion {
  Crpq cq;                 ///< letter atoms only
  std::vector<Word> words; ///< word chosen for each atom of the parent query
  std::vector<VarId> var_map;  ///< parent variable ↦ variable of `cq`
};

/// The expansion of `q` choosing `words[i]` for atom i. Throws InputError if a
/// word is not in its atom's language.
Expansion expand(const Crpq& q, const std::vector<Word>& words);

/// Calls `visit` on every expansion whose atom words have length ≤ max_len, in
/// increasing total length, until it returns false.
void for_each_expansion(const Crpq& q, std::size_t max_len, const std::function<bool(const Expansion&)>& visit);
/// Same order, but yields only the word choices (no expansion is built).
void for_each_word_choice(const Crpq& q, std::size_t max_len,
                          const std::function<bool(const std::vector<Word>&)>& visit);

struct CanonicalDb {
  GraphDb db;
  Tuple outputs;
};

/// Reads a CQ as a database: one node per variable, one edge per atom.
CanonicalDb canonical_database(const Crpq& cq);
inline CanonicalDb canonical_database(const Expansion& e) { return canonical_database(e.cq); }

}  // namespace crpq
