#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "crpq/query.hpp"

namespace crpq {

using Tuple = std::vector<NodeId>;
/// Partial assignment of query variables to database nodes.
using Pin = std::map<VarId, NodeId>;

/// Answers of one RPQ atom: (u,v) such that some u→v path is labelled by a word of L.
class AtomTable {
 public:
  explicit AtomTable(std::size_t nodes = 0) : succ_(nodes), pred_(nodes) {}

  void add(NodeId u, NodeId v);
  bool contains(NodeId u, NodeId v) const;
  const std::vector<NodeId>& successors(NodeId u) const { return succ_[u]; }
  const std::vector<NodeId>& predecessors(NodeId v) const { return pred_[v]; }
  std::size_t size() const { return size_; }
  std::vector<std::pair<NodeId, NodeId>> pairs() const;

 private:
  std::vector<std::vector<NodeId>> succ_, pred_;
  std::size_t size_ = 0;
};

/// Reachability in the product of `db` and `nfa`, from every node.
AtomTable atom_table(const GraphDb& db, const Nfa& nfa);

/// Output tuples of `q` on `db` realized by assignments extending `pin`.
std::set<Tuple> evaluate(const Crpq& q, const GraphDb& db, const Pin& pin = {});
/// Whether some assignment extending `pin` satisfies every atom.
bool satisfies(const Crpq& q, const GraphDb& db, const Pin& pin = {});
std::set<Tuple> evaluate_union(const Ucrpq& u, const GraphDb& db);

/// Pins the outputs of `q` positionally to `tuple`; nullopt when a repeated
/// output variable would need two different nodes.
std::optional<Pin> pin_outputs(const Crpq& q, const Tuple& tuple);

}  // namespace crpq
