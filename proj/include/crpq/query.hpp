#pragma once

// CRPQ / UCRPQ / graph database data model and the text and JSON formats.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crpq/automata.hpp"

namespace crpq {

using VarId = std::uint32_t;
using NodeId = std::uint32_t;

/// An atom label: the expression, its position automaton and a printed key.
/// Two labels over the same alphabet are interchangeable iff their keys match.
struct Label {
  RegexAst ast;
  Nfa nfa;
  std::string key;
};
using LabelRef = std::shared_ptr<const Label>;

LabelRef make_label(RegexAst ast, const Alphabet& alphabet);
LabelRef letter_label(Symbol a, const Alphabet& alphabet);
LabelRef any_star_label(const Alphabet& alphabet);

struct Atom {
  VarId source = 0;
  LabelRef label;
  VarId target = 0;
};

struct Crpq {
  std::string name = "q";
  AlphabetRef alphabet;
  std::vector<std::string> vars;
  std::vector<VarId> outputs;
  std::vector<Atom> atoms;

  /// Returns the id of `name`, declaring it if needed.
  VarId var(const std::string& name);
  std::optional<VarId> find_var(std::string_view name) const;
  /// Declares a fresh variable named `hint`, suffixed until unique.
  VarId fresh_var(const std::string& hint);

  std::size_t num_vars() const { return vars.size(); }
  std::size_t num_atoms() const { return atoms.size(); }
  std::size_t arity() const { return outputs.size(); }
  bool is_output(VarId v) const;

  /// Letter of atom i when its label is a single letter.
  std::optional<Symbol> atom_letter(std::size_t i) const;
  /// True when every atom is labelled by a single letter.
  bool is_cq() const;

  void add_atom(VarId s, LabelRef label, VarId t) { atoms.push_back({s, std::move(label), t}); }
  /// Drops variables that are neither outputs nor atom endpoints and renumbers.
  void drop_unused_vars();
};

struct Ucrpq {
  AlphabetRef alphabet;
  std::vector<Crpq> disjuncts;

  std::size_t arity() const { return disjuncts.empty() ? 0 : disjuncts.front().arity(); }
  std::size_t max_atoms() const;
  std::size_t max_vars() const;
};

Ucrpq as_union(const Crpq& q);

struct GraphDb {
  struct Edge {
    NodeId source;
    Symbol label;
    NodeId target;
    bool operator==(const Edge&) const = default;
  };

  AlphabetRef alphabet;
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  NodeId add_node(const std::string& name);
  std::optional<NodeId> find_node(std::string_view name) const;
  /// Adds an edge unless the same triple is already present.
  void add_edge(NodeId s, Symbol a, NodeId t);
  std::size_t num_nodes() const { return nodes.size(); }
};

struct Multigraph {
  struct Edge {
    std::uint32_t source;
    std::uint32_t target;
    std::size_t id;
  };
  std::vector<std::string> names;
  std::vector<Edge> edges;

  std::size_t num_vertices() const { return names.size(); }
  std::uint32_t add_vertex(const std::string& name);
  void add_edge(std::uint32_t s, std::uint32_t t);
};

/// Parses a query file. Without an `alphabet` header the alphabet is the set of
/// single characters used in the expressions, sorted. `extra_letters` are
/// appended to the alphabet (so a database can mention letters no atom uses).
Ucrpq parse_query(std::string_view text, const std::vector<std::string>& extra_letters = {});
/// Parses a file that must contain exactly one query.
Crpq parse_crpq(std::string_view text, const std::vector<std::string>& extra_letters = {});
/// Parses a single query body against a fixed alphabet, e.g. "q(x,y){ x -[a]-> y }".
Crpq parse_crpq_with(std::string_view text, const AlphabetRef& alphabet);

std::string to_text(const Crpq& q);
std::string to_text(const Ucrpq& u);

/// Letter names mentioned by a database JSON document, in first-seen order.
std::vector<std::string> graphdb_letters(std::string_view json);
/// Loads {"nodes":[...],"edges":[[src,letter,dst],...]}. Letters are resolved
/// against `alphabet`, or collected into a fresh alphabet when it is null.
GraphDb load_graphdb(std::string_view json, AlphabetRef alphabet = nullptr);
std::string save_graphdb(const GraphDb& db);

/// Alphabet with the letters of `a` followed by the new letters of `b`.
AlphabetRef merge_alphabets(const AlphabetRef& a, const AlphabetRef& b);
/// The same query over `alphabet`, which must contain every letter used.
Crpq rebase(const Crpq& q, const AlphabetRef& alphabet);
Ucrpq rebase(const Ucrpq& u, const AlphabetRef& alphabet);
GraphDb rebase(const GraphDb& db, const AlphabetRef& alphabet);

/// One vertex per variable and one edge per atom.
Multigraph underlying_graph(const Crpq& q);

}  // namespace crpq
