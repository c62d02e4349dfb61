#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crpq/evaluation.hpp"
#include "crpq/refinement.hpp"

namespace crpq {

enum class ContainmentStatus { Contained, ContainedUpToBound, NotContained };
enum class ContainmentMode { Auto, Sre, SinglePath, Bounded };

std::string to_string(ContainmentStatus s);
std::string to_string(ContainmentMode m);
ContainmentMode parse_mode(const std::string& name);

struct Counterexample {
  std::size_t disjunct = 0;  ///< index of the left disjunct expanded
  Expansion expansion;
  GraphDb db;
  Tuple outputs;
};

struct ContainmentVerdict {
  ContainmentStatus status = ContainmentStatus::ContainedUpToBound;
  ContainmentMode mode = ContainmentMode::Bounded;
  std::size_t bound = 0;    ///< per-atom word length bound used by the expansion search
  std::size_t checked = 0;  ///< expansions examined
  std::optional<Counterexample> counterexample;

  bool contained() const { return status != ContainmentStatus::NotContained; }
  bool complete() const { return status != ContainmentStatus::ContainedUpToBound; }
};

/// Whether `right` (outputs pinned to `outputs`) holds on `db`.
bool right_holds(const Ucrpq& right, const GraphDb& db, const Tuple& outputs);

/// Checks every expansion of `left` with atom words of length ≤ max_len, in
/// increasing total size. A positive answer is ContainedUpToBound.
ContainmentVerdict contained_bounded(const Ucrpq& left, const Ucrpq& right, std::size_t max_len);

/// One way of reading an atom language as a union of factor concatenations.
/// An empty alternative stands for ε. Returns nullopt outside the fragment
/// (a⁺, letter sets, a* = ε|a⁺, optional parts, unions, and Σ* when allowed).
std::optional<std::vector<SreFactors>> sre_alternatives(const RegexAst& ast, std::size_t alphabet_size,
                                                        bool allow_any_star);

struct SreSplit {
  Ucrpq query;           ///< one atom per factor, ε alternatives collapsed
  bool relaxed = false;  ///< some Σ* factor was dropped
  /// For each disjunct of `query`: its source disjunct, and per source atom the
  /// indices of the atoms its factors became (empty when collapsed or dropped).
  std::vector<std::size_t> source;
  std::vector<std::vector<std::vector<std::size_t>>> factor_atoms;
};

/// Splits every atom of `u` into single-factor atoms, distributing unions,
/// optional parts and a* into separate disjuncts. On the left side Σ* factors
/// are dropped (setting `relaxed`); on the right they are kept as Σ* atoms.
/// Throws FragmentError outside the fragment.
SreSplit sre_split(const Ucrpq& u, bool left_side);

/// Whether `contained_sre` accepts the pair.
bool sre_applicable(const Ucrpq& left, const Ucrpq& right);

/// Complete decision for the (ε-extended) SRE fragment. Both sides are split
/// into single-factor atoms and `left` is expanded with per-atom bound
/// B = max atoms of the split right side + 1. Σ* factors on the left are
/// dropped, which only makes the left side larger; when that happened a
/// negative answer is settled by `contained_bounded` instead.
/// Throws FragmentError outside the fragment.
ContainmentVerdict contained_sre(const Ucrpq& left, const Ucrpq& right, std::size_t fallback_len = 8);

/// Per-atom expansion bound contained_sre uses for `right`.
std::size_t sre_bound(const Ucrpq& right);

/// K ⊆ Σ*·(⋂ Lⱼ)·Σ*. Throws InputError if ε belongs to any of the languages.
bool contained_single_path(const Nfa& k, const std::vector<Nfa>& ls);
/// One atom x −K→ y against atoms all from x to y (ε-free). Outputs may pin
/// x or y, provided the right side pins its endpoints at the same positions.
bool single_path_applicable(const Ucrpq& left, const Ucrpq& right);

/// Dispatches on `mode`; Auto tries SRE, then single path, then bounded(max_len).
ContainmentVerdict contained(const Ucrpq& left, const Ucrpq& right, ContainmentMode mode = ContainmentMode::Auto,
                             std::size_t max_len = 8);

struct EquivalenceVerdict {
  ContainmentVerdict forward;   ///< left ⊑ right
  ContainmentVerdict backward;  ///< right ⊑ left
  bool equivalent() const { return forward.contained() && backward.contained(); }
  bool complete() const {
    if (!equivalent()) return !forward.contained() ? forward.complete() : backward.complete();
    return forward.complete() && backward.complete();
  }
};

EquivalenceVerdict equivalent(const Ucrpq& a, const Ucrpq& b, ContainmentMode mode = ContainmentMode::Auto,
                              std::size_t max_len = 8);

struct Disagreement {
  GraphDb db;
  Tuple tuple;
  bool in_left = false;  ///< tuple is an answer of the left query only
  std::size_t trial = 0;
};

/// Random graph databases with 1..db_size nodes; first database on which the
/// two queries' answers differ.
std::optional<Disagreement> falsify_equivalence(const Ucrpq& a, const Ucrpq& b, std::size_t trials,
                                                std::size_t db_size, std::uint64_t seed);

/// Random database with 1..max_nodes nodes; each possible edge is present
/// with a density drawn per database.
GraphDb random_graphdb(const AlphabetRef& alphabet, std::size_t max_nodes, std::mt19937_64& rng);

}  // namespace crpq
