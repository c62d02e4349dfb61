#pragma once

// Contraction, segments, minors, redundant atoms and strong-minimality certificates.

#include <optional>
#include <vector>

#include "crpq/containment.hpp"
#include "crpq/query.hpp"
#include "crpq/refinement.hpp"

namespace crpq {

/// Non-output variable with exactly one incoming and one outgoing atom endpoint.
std::vector<bool> internal_vars(const Crpq& q);

/// Repeatedly replaces x −L→ y −L'→ z (two distinct atoms, y internal) by
/// x −L·L'→ z, always picking the lowest-indexed contractible variable.
Crpq contract(const Crpq& q);

struct Contraction {
  Crpq query;
  std::vector<VarId> orig;        ///< result variable ↦ input variable
  std::vector<std::size_t> contr; ///< input atom ↦ result atom
};
Contraction contract_tracked(const Crpq& q);

struct Segment {
  std::vector<std::size_t> atoms;  ///< in path order
  VarId start = 0;
  VarId end = 0;
  bool cyclic = false;  ///< every variable on it is internal
};

/// Maximal internal paths; they partition the atoms. Cycles start at their lowest atom.
std::vector<Segment> segments(const Crpq& q);

/// One vertex per external variable (then one per isolated cycle), one edge per segment.
Multigraph segment_graph(const Crpq& q);

inline constexpr std::size_t kDefaultMinorCap = 8;

/// Whether `h` is obtained from `g` by deleting edges and vertices and
/// contracting edges. Throws ResourceError when `g` has more than `cap` edges.
bool is_minor(const Multigraph& h, const Multigraph& g, std::size_t cap = kDefaultMinorCap);

struct RedundancyStep {
  std::size_t atom = 0;  ///< index in the input query
  std::string label;
  ContainmentVerdict verdict;  ///< query without the atom ⊑ current query
  bool removed = false;
};

struct RedundancyReport {
  Crpq query;
  std::vector<RedundancyStep> steps;
  /// Every verdict was complete, so the result is non-redundant and equivalent.
  bool complete = true;
};

/// Greedily drops atoms whose removal keeps the query equivalent, re-checking
/// against the current query after each removal.
RedundancyReport remove_redundant_atoms(const Crpq& q, ContainmentMode mode = ContainmentMode::Auto,
                                        std::size_t max_len = 8);

struct Certificate {
  enum class Status { VerifiedUpTo, Refuted };
  Expansion expansion;
  Crpq core;
  Multigraph segment_graph;
  std::size_t segment_count = 0;  ///< lower bound on atoms of equivalent queries when hom-minimal
  Status status = Status::VerifiedUpTo;
  std::size_t bound = 0;
  std::size_t checked = 0;
  std::optional<Expansion> witness;  ///< maps into `expansion` but not back
  std::size_t witness_disjunct = 0;
};

/// Checks that no expansion of `u` with at most `hom_bound` atoms maps into the
/// expansion of disjunct `disjunct` given by `words` without a map back.
/// Throws InputError if the words do not describe an expansion.
Certificate check_strong_minimality(const Ucrpq& u, std::size_t disjunct, const std::vector<Word>& words,
                                    std::size_t hom_bound);

}  // namespace crpq
