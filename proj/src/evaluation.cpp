#include "crpq/evaluation.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <unordered_map>

namespace crpq {

void AtomTable::add(NodeId u, NodeId v) {
  auto& s = succ_[u];
  auto it = std::lower_bound(s.begin(), s.end(), v);
  if (it != s.end() && *it == v) return;
  s.insert(it, v);
  auto& p = pred_[v];
  p.insert(std::lower_bound(p.begin(), p.end(), u), u);
  ++size_;
}

bool AtomTable::contains(NodeId u, NodeId v) const {
  const auto& s = succ_[u];
  return std::binary_search(s.begin(), s.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> AtomTable::pairs() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId u = 0; u < succ_.size(); ++u)
    for (NodeId v : succ_[u]) out.emplace_back(u, v);
  return out;
}

namespace {

using Adjacency = std::vector<std::vector<std::pair<Symbol, NodeId>>>;

Adjacency adjacency(const GraphDb& db) {
  Adjacency out(db.num_nodes());
  for (const auto& e : db.edges) out[e.source].emplace_back(e.label, e.target);
  return out;
}

AtomTable product_table(const GraphDb& db, const Adjacency& adj, const Nfa& nfa) {
  const std::size_t n = db.num_nodes();
  const std::size_t q = nfa.num_states();
  AtomTable table(n);
  const auto init = nfa.initial_states();
  std::vector<char> seen(n * q);
  std::deque<std::pair<NodeId, State>> queue;
  for (NodeId u = 0; u < n; ++u) {
    std::fill(seen.begin(), seen.end(), 0);
    queue.clear();
    for (State s : init) {
      seen[u * q + s] = 1;
      queue.emplace_back(u, s);
    }
    while (!queue.empty()) {
      auto [v, s] = queue.front();
      queue.pop_front();
      if (nfa.is_final(s)) table.add(u, v);
      for (auto [a, w] : adj[v]) {
        if (a >= nfa.alphabet_size()) continue;
        for (State t : nfa.successors(s, a)) {
          auto& mark = seen[w * q + t];
          if (mark) continue;
          mark = 1;
          queue.emplace_back(w, t);
        }
      }
    }
  }
  return table;
}

class Join {
 public:
  Join(const Crpq& q, const GraphDb& db, const Pin& pin) : q_(q), db_(db), assign_(q.num_vars(), kUnset) {
    for (auto [v, n] : pin) {
      if (v < assign_.size()) assign_[v] = n;
    }
    Adjacency adj = adjacency(db);
    std::unordered_map<std::string, std::size_t> by_key;
    for (const auto& a : q.atoms) {
      auto [it, fresh] = by_key.emplace(a.label->key, tables_.size());
      if (fresh) tables_.push_back(product_table(db, adj, a.label->nfa));
      atom_table_.push_back(it->second);
    }
    plan();
  }

  bool any() {
    stop_at_first_ = true;
    return search(0);
  }

  std::set<Tuple> all() {
    stop_at_first_ = false;
    search(0);
    return std::move(results_);
  }

 private:
  static constexpr NodeId kUnset = std::numeric_limits<NodeId>::max();

  // Greedy static order: prefer atoms whose endpoints are already bound, then small tables.
  void plan() {
    std::vector<bool> bound(q_.num_vars(), false);
    for (VarId v = 0; v < q_.num_vars(); ++v) bound[v] = assign_[v] != kUnset;
    std::vector<bool> used(q_.num_atoms(), false);
    for (std::size_t step = 0; step < q_.num_atoms(); ++step) {
      std::size_t best = SIZE_MAX;
      std::pair<int, std::size_t> best_score{3, SIZE_MAX};
      for (std::size_t i = 0; i < q_.num_atoms(); ++i) {
        if (used[i]) continue;
        const Atom& a = q_.atoms[i];
        int unbound = (bound[a.source] ? 0 : 1) + (bound[a.target] ? 0 : 1);
        if (a.source == a.target) unbound = bound[a.source] ? 0 : 1;
        std::pair<int, std::size_t> score{unbound, tables_[atom_table_[i]].size()};
        if (score < best_score) {
          best_score = score;
          best = i;
        }
      }
      used[best] = true;
      order_.push_back(best);
      bound[q_.atoms[best].source] = bound[q_.atoms[best].target] = true;
    }
    for (VarId v = 0; v < q_.num_vars(); ++v)
      if (!bound[v]) free_vars_.push_back(v);
  }

  bool all_outputs_bound() const {
    return std::all_of(q_.outputs.begin(), q_.outputs.end(), [&](VarId v) { return assign_[v] != kUnset; });
  }

  Tuple current_tuple() const {
    Tuple t;
    for (VarId v : q_.outputs) t.push_back(assign_[v]);
    return t;
  }

  bool bind(VarId v, NodeId n, std::size_t next) {
    assign_[v] = n;
    bool r = search(next);
    assign_[v] = kUnset;
    return r;
  }

  // Steps [0, order_.size()) join atoms; the remaining steps bind isolated variables.
  bool search(std::size_t step) {
    if (!stop_at_first_ && all_outputs_bound() && results_.count(current_tuple())) return false;
    if (step == order_.size() + free_vars_.size()) {
      if (stop_at_first_) return true;
      results_.insert(current_tuple());
      return false;
    }
    if (step >= order_.size()) {
      VarId v = free_vars_[step - order_.size()];
      const bool matters = q_.is_output(v);
      for (NodeId n = 0; n < db_.num_nodes(); ++n) {
        if (bind(v, n, step + 1)) return true;
        if (!matters) break;  // any node will do
      }
      return false;
    }
    const Atom& a = q_.atoms[order_[step]];
    const AtomTable& t = tables_[atom_table_[order_[step]]];
    const NodeId s = assign_[a.source];
    const NodeId d = assign_[a.target];
    if (s != kUnset && d != kUnset) return t.contains(s, d) && search(step + 1);
    if (s != kUnset) {
      for (NodeId w : t.successors(s))
        if (bind(a.target, w, step + 1)) return true;
      return false;
    }
    if (d != kUnset) {
      for (NodeId u : t.predecessors(d))
        if (bind(a.source, u, step + 1)) return true;
      return false;
    }
    if (a.source == a.target) {
      for (NodeId u = 0; u < db_.num_nodes(); ++u)
        if (t.contains(u, u) && bind(a.source, u, step + 1)) return true;
      return false;
    }
    for (NodeId u = 0; u < db_.num_nodes(); ++u) {
      if (t.successors(u).empty()) continue;
      assign_[a.source] = u;
      for (NodeId w : t.successors(u))
        if (bind(a.target, w, step + 1)) {
          assign_[a.source] = kUnset;
          return true;
        }
      assign_[a.source] = kUnset;
    }
    return false;
  }

  const Crpq& q_;
  const GraphDb& db_;
  std::vector<NodeId> assign_;
  std::vector<AtomTable> tables_;
  std::vector<std::size_t> atom_table_;
  std::vector<std::size_t> order_;
  std::vector<VarId> free_vars_;
  bool stop_at_first_ = false;
  std::set<Tuple> results_;
};

}  // namespace

AtomTable atom_table(const GraphDb& db, const Nfa& nfa) { return product_table(db, adjacency(db), nfa); }

std::set<Tuple> evaluate(const Crpq& q, const GraphDb& db, const Pin& pin) { return Join(q, db, pin).all(); }

bool satisfies(const Crpq& q, const GraphDb& db, const Pin& pin) { return Join(q, db, pin).any(); }

std::set<Tuple> evaluate_union(const Ucrpq& u, const GraphDb& db) {
  std::set<Tuple> out;
  for (const auto& d : u.disjuncts) {
    auto r = evaluate(d, db);
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::optional<Pin> pin_outputs(const Crpq& q, const Tuple& tuple) {
  Pin pin;
  for (std::size_t i = 0; i < q.outputs.size() && i < tuple.size(); ++i) {
    auto [it, fresh] = pin.emplace(q.outputs[i], tuple[i]);
    if (!fresh && it->second != tuple[i]) return std::nullopt;
  }
  return pin;
}

}  // namespace crpq
