#include "crpq/approximation.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "crpq/error.hpp"
#include "crpq/structure.hpp"

namespace crpq {

namespace {

// Maps labels to a representative of their language, so that keys compare languages.
class LabelCanon {
 public:
  explicit LabelCanon(const Alphabet& alphabet) : alphabet_(alphabet) {}

  LabelRef get(const LabelRef& l) {
    if (auto it = by_key_.find(l->key); it != by_key_.end()) return it->second;
    for (const auto& r : reps_) {
      bool same = false;
      try {
        same = language_equivalent(l->nfa, r->nfa);
      } catch (const ResourceError&) {
        same = false;  // keep them apart
      }
      if (same) return by_key_[l->key] = r;
    }
    reps_.push_back(l);
    return by_key_[l->key] = l;
  }
  LabelRef get(RegexAst ast) { return get(make_label(std::move(ast), alphabet_)); }

  Crpq canonical(Crpq q) {
    for (auto& a : q.atoms) a.label = get(a.label);
    return q;
  }

 private:
  const Alphabet& alphabet_;
  std::unordered_map<std::string, LabelRef> by_key_;
  std::vector<LabelRef> reps_;
};

struct Option {
  State to = 0;
  LabelRef label;
  std::optional<Symbol> letter;
};

struct AtomInfo {
  std::vector<std::vector<Option>> options;  // by source state
  std::vector<bool> final;
  bool epsilon = false;
};

AtomInfo atom_info(const Atom& a, const Alphabet& alphabet, LabelCanon& canon) {
  AtomInfo info;
  const Nfa& nfa = a.label->nfa;
  const std::size_t n = nfa.num_states();
  info.options.resize(n);
  info.final.resize(n);
  info.epsilon = has_epsilon(nfa);
  Nfa eps = epsilon_nfa(alphabet.size());
  for (State p = 0; p < n; ++p) {
    info.final[p] = nfa.is_final(p);
    for (State q = 0; q < n; ++q) {
      LabelRef sub = make_label(sublanguage_ast(a.label->ast, p, q), alphabet);
      // {ε} steps only pad chains
      if (is_empty(sub->nfa) || language_inclusion(sub->nfa, eps)) continue;
      info.options[p].push_back({q, canon.get(sub), std::nullopt});
    }
    for (State q = 0; q < n; ++q)
      for (Symbol x = 0; x < alphabet.size(); ++x) {
        const auto& succ = nfa.successors(p, x);
        if (std::find(succ.begin(), succ.end(), q) != succ.end())
          info.options[p].push_back({q, canon.get(letter_label(x, alphabet)), x});
      }
  }
  return info;
}

struct EtaAtom {
  std::uint32_t source;
  LabelRef label;
  std::uint32_t target;
};

struct WalkStep {
  State from, to;
  std::optional<Symbol> letter;
  LabelRef label;
  std::uint32_t vertex;  // η vertex reached
};

class Search {
 public:
  Search(const Crpq& g, std::size_t disjunct, std::size_t k, std::size_t m, LabelCanon& canon, std::size_t budget,
         std::size_t& nodes, const std::function<bool(const ExplicitApproximation&)>& visit)
      : g_(g), disjunct_(disjunct), k_(k), m_(m), canon_(canon), budget_(budget), nodes_(nodes), visit_(visit) {
    for (const auto& a : g.atoms) info_.push_back(atom_info(a, *g.alphabet, canon));
    walks_.resize(g.num_atoms());
    equality_.resize(g.num_atoms());
  }

  // false when the visitor asked to stop
  bool run() {
    // restricted growth strings assign γ's variables to η vertices
    std::vector<std::uint32_t> block(g_.num_vars(), 0);
    std::function<bool(std::size_t, std::uint32_t)> rec = [&](std::size_t v, std::uint32_t used) -> bool {
      if (v == g_.num_vars()) {
        setup(block, used);
        return atom(0);
      }
      for (std::uint32_t b = 0; b <= used && b < g_.num_vars(); ++b) {
        block[v] = b;
        if (!rec(v + 1, std::max(used, b + 1))) return false;
      }
      return true;
    };
    return rec(0, 0);
  }

 private:
  void setup(const std::vector<std::uint32_t>& block, std::uint32_t blocks) {
    block_ = block;
    nverts_ = blocks;
    base_verts_ = blocks;
    out_.assign(blocks, false);
    for (VarId v : g_.outputs) out_[block[v]] = true;
    indeg_.assign(blocks, 0);
    outdeg_.assign(blocks, 0);
    out_atoms_.assign(blocks, {});
    atoms_.clear();
  }

  void tick() {
    if (++nodes_ > budget_)
      throw ResourceError("approximation search exceeded " + std::to_string(budget_) + " nodes");
  }

  // Sum of degrees over vertices that stay external whatever Σ* atoms are added.
  std::size_t external_degree() const {
    std::size_t s = 0;
    for (std::uint32_t v = 0; v < nverts_; ++v)
      if (out_[v] || indeg_[v] >= 2 || outdeg_[v] >= 2) s += indeg_[v] + outdeg_[v];
    return s;
  }

  void push_atom(std::uint32_t s, const LabelRef& l, std::uint32_t t) {
    if (t == nverts_) {
      ++nverts_;
      out_.push_back(false);
      indeg_.push_back(0);
      outdeg_.push_back(0);
      out_atoms_.emplace_back();
    }
    out_atoms_[s].push_back(atoms_.size());
    atoms_.push_back({s, l, t});
    ++outdeg_[s];
    ++indeg_[t];
  }

  void pop_atom() {
    EtaAtom a = atoms_.back();
    atoms_.pop_back();
    out_atoms_[a.source].pop_back();
    --outdeg_[a.source];
    --indeg_[a.target];
    if (a.target + 1 == nverts_ && a.target >= base_verts_ && indeg_[a.target] == 0 && outdeg_[a.target] == 0) {
      --nverts_;
      out_.pop_back();
      indeg_.pop_back();
      outdeg_.pop_back();
      out_atoms_.pop_back();
    }
  }

  bool atom(std::size_t i) {
    tick();
    if (i == g_.num_atoms()) return finish();
    const Atom& a = g_.atoms[i];
    std::uint32_t hx = block_[a.source], hy = block_[a.target];
    walks_[i].clear();
    equality_[i] = false;
    if (info_[i].epsilon && hx == hy) {
      equality_[i] = true;
      if (!atom(i + 1)) return false;
      equality_[i] = false;
    }
    used_.clear();
    return walk(i, hx, 0);
  }

  bool walk(std::size_t i, std::uint32_t v, State q) {
    tick();
    const AtomInfo& info = info_[i];
    const std::size_t len = walks_[i].size();
    if (len > 0 && info.final[q] && v == block_[g_.atoms[i].target]) {
      auto saved_used = used_;
      if (!atom(i + 1)) return false;
      used_ = std::move(saved_used);
    }
    if (len == m_) return true;
    for (const Option& o : info.options[q]) {
      // follow an existing atom with the same language
      for (std::size_t e : std::vector<std::size_t>(out_atoms_[v])) {
        if (atoms_[e].label != o.label) continue;
        auto key = std::make_pair(e, q);
        if (std::find(used_.begin(), used_.end(), key) != used_.end()) continue;
        used_.push_back(key);
        walks_[i].push_back({q, o.to, o.letter, o.label, atoms_[e].target});
        bool go = walk(i, atoms_[e].target, o.to);
        walks_[i].pop_back();
        used_.pop_back();
        if (!go) return false;
      }
      // or add a new one, to an existing vertex or a fresh one
      for (std::uint32_t w = 0; w <= nverts_; ++w) {
        bool dup = false;
        for (std::size_t e : out_atoms_[v]) dup = dup || (atoms_[e].target == w && atoms_[e].label == o.label);
        if (dup) continue;
        push_atom(v, o.label, w);
        bool go = true;
        if (external_degree() <= 2 * k_) {
          std::size_t e = atoms_.size() - 1;
          used_.emplace_back(e, q);
          walks_[i].push_back({q, o.to, o.letter, o.label, w});
          go = walk(i, w, o.to);
          walks_[i].pop_back();
          used_.pop_back();
        }
        pop_atom();
        if (!go) return false;
      }
    }
    return true;
  }

  bool finish() {
    // η before bridging
    Crpq eta;
    eta.name = g_.name;
    eta.alphabet = g_.alphabet;
    std::vector<bool> named(nverts_, false);
    std::vector<std::string> names(nverts_);
    for (VarId v = 0; v < g_.num_vars(); ++v)
      if (!named[block_[v]]) names[block_[v]] = g_.vars[v], named[block_[v]] = true;
    for (std::size_t i = 0; i < walks_.size(); ++i)
      for (std::size_t j = 0; j < walks_[i].size(); ++j) {
        std::uint32_t w = walks_[i][j].vertex;
        if (!named[w]) names[w] = "t" + std::to_string(i) + "_" + std::to_string(j + 1), named[w] = true;
      }
    for (std::uint32_t w = 0; w < nverts_; ++w) eta.fresh_var(names[w].empty() ? "t" : names[w]);
    for (VarId v : g_.outputs) eta.outputs.push_back(block_[v]);
    for (const auto& a : atoms_) eta.add_atom(a.source, a.label, a.target);

    std::size_t segs = segments(eta).size();
    std::vector<std::uint32_t> sinks, sources;
    for (std::uint32_t w = 0; w < nverts_; ++w) {
      if (out_[w]) continue;
      if (indeg_[w] == 1 && outdeg_[w] == 0) sinks.push_back(w);
      if (indeg_[w] == 0 && outdeg_[w] == 1) sources.push_back(w);
    }
    if (segs <= k_) return emit(eta);
    std::size_t need = segs - k_;
    if (need > sinks.size() || need > sources.size()) return true;
    // a Σ* atom from a sink to a source of another path joins the two; one
    // closing a path into a cycle joins nothing, so the count is rechecked
    LabelRef any = canon_.get(any_star_label(*g_.alphabet));
    std::vector<bool> taken(sources.size(), false);
    std::function<bool(std::size_t, std::size_t)> bridge = [&](std::size_t from, std::size_t left) -> bool {
      if (left == 0) return segments(eta).size() <= k_ ? emit(eta) : true;
      for (std::size_t s = from; s + left <= sinks.size(); ++s)
        for (std::size_t t = 0; t < sources.size(); ++t) {
          if (taken[t]) continue;
          taken[t] = true;
          eta.add_atom(sinks[s], any, sources[t]);
          bool go = bridge(s + 1, left - 1);
          eta.atoms.pop_back();
          taken[t] = false;
          if (!go) return false;
        }
      return true;
    };
    return bridge(0, need);
  }

  bool emit(const Crpq& eta) {
    ExplicitApproximation x;
    x.disjunct = disjunct_;
    x.eta = eta;
    // ρ: γ with equality atoms collapsed and every other atom replaced by its chain
    std::vector<VarId> rep(g_.num_vars());
    std::iota(rep.begin(), rep.end(), VarId{0});
    std::function<VarId(VarId)> find = [&](VarId v) { return rep[v] == v ? v : rep[v] = find(rep[v]); };
    for (std::size_t i = 0; i < g_.num_atoms(); ++i)
      if (equality_[i]) {
        VarId a = find(g_.atoms[i].source), b = find(g_.atoms[i].target);
        if (a != b) rep[std::max(a, b)] = std::min(a, b);
      }
    Crpq& rho = x.rho;
    rho.name = g_.name;
    rho.alphabet = g_.alphabet;
    std::vector<VarId> id(g_.num_vars());
    for (VarId v = 0; v < g_.num_vars(); ++v)
      if (find(v) == v) {
        id[v] = rho.var(g_.vars[v]);
        x.h.map.push_back(block_[v]);
      }
    for (VarId v = 0; v < g_.num_vars(); ++v) id[v] = id[find(v)];
    for (VarId v : g_.outputs) rho.outputs.push_back(id[v]);
    for (std::size_t i = 0; i < g_.num_atoms(); ++i) {
      if (equality_[i]) continue;
      VarId prev = id[g_.atoms[i].source];
      for (std::size_t j = 0; j < walks_[i].size(); ++j) {
        VarId next = id[g_.atoms[i].target];
        if (j + 1 < walks_[i].size()) {
          next = rho.fresh_var("t" + std::to_string(i) + "_" + std::to_string(j + 1));
          x.h.map.push_back(walks_[i][j].vertex);
        }
        rho.add_atom(prev, walks_[i][j].label, next);
        prev = next;
      }
    }
    Contraction c = contract_tracked(eta);
    x.alpha = canon_.canonical(std::move(c.query));
    x.orig = std::move(c.orig);
    x.contr = std::move(c.contr);
    return visit_(x);
  }

  const Crpq& g_;
  std::size_t disjunct_, k_, m_;
  LabelCanon& canon_;
  std::size_t budget_;
  std::size_t& nodes_;
  const std::function<bool(const ExplicitApproximation&)>& visit_;
  std::vector<AtomInfo> info_;

  std::vector<std::uint32_t> block_;
  std::uint32_t nverts_ = 0, base_verts_ = 0;
  std::vector<bool> out_;
  std::vector<std::size_t> indeg_, outdeg_;
  std::vector<std::vector<std::size_t>> out_atoms_;
  std::vector<EtaAtom> atoms_;
  std::vector<std::vector<WalkStep>> walks_;
  std::vector<bool> equality_;
  std::vector<std::pair<std::size_t, State>> used_;  // (η atom, state) pairs of the current walk
};

void search_all(const Ucrpq& g, std::size_t k, std::size_t m, LabelCanon& canon, std::size_t budget,
                const std::function<bool(const ExplicitApproximation&)>& visit) {
  std::size_t nodes = 0;
  for (std::size_t d = 0; d < g.disjuncts.size(); ++d) {
    Search s(g.disjuncts[d], d, k, m, canon, budget, nodes, visit);
    if (!s.run()) return;
  }
}

std::string shape_signature(const Crpq& q) {
  std::vector<std::string> keys;
  for (const auto& a : q.atoms) keys.push_back(a.label->key);
  std::sort(keys.begin(), keys.end());
  std::string s = std::to_string(q.num_vars()) + "/" + std::to_string(q.arity());
  for (const auto& k : keys) s += "|" + k;
  return s;
}

// length of a shortest word, 0 for the empty language
std::size_t shortest_word(const Nfa& n) {
  std::vector<std::size_t> dist(n.num_states(), SIZE_MAX);
  std::vector<State> queue = n.initial_states();
  for (State s : queue) dist[s] = 0;
  for (std::size_t at = 0; at < queue.size(); ++at) {
    State s = queue[at];
    if (n.is_final(s)) return dist[s];
    for (Symbol a = 0; a < n.alphabet_size(); ++a)
      for (State t : n.successors(s, a))
        if (dist[t] == SIZE_MAX) dist[t] = dist[s] + 1, queue.push_back(t);
  }
  return 0;
}

// b ⊑ a by a variable map from `a` into `b` sending each atom of `a` onto an
// atom of `b` with a smaller language. Sufficient, not necessary.
class AtomwiseContainment {
 public:
  bool operator()(const Crpq& b, const Crpq& a) {
    if (a.arity() != b.arity()) return false;
    std::vector<std::optional<VarId>> h(a.num_vars());
    for (std::size_t i = 0; i < a.arity(); ++i) {
      auto& t = h[a.outputs[i]];
      if (t && *t != b.outputs[i]) return false;
      t = b.outputs[i];
    }
    return extend(a, b, h, 0);
  }

 private:
  std::map<std::pair<std::string, std::string>, bool> cache_;

  bool included(const LabelRef& small, const LabelRef& large) {
    if (small->key == large->key) return true;
    auto [it, fresh] = cache_.try_emplace({small->key, large->key}, false);
    if (fresh) {
      try {
        it->second = language_inclusion(small->nfa, large->nfa);
      } catch (const ResourceError&) {
      }
    }
    return it->second;
  }

  bool extend(const Crpq& a, const Crpq& b, std::vector<std::optional<VarId>>& h, std::size_t i) {
    if (i == a.num_atoms()) return true;
    const Atom& x = a.atoms[i];
    for (const Atom& y : b.atoms) {
      if ((h[x.source] && *h[x.source] != y.source) || (h[x.target] && *h[x.target] != y.target)) continue;
      if (x.source == x.target && y.source != y.target) continue;
      if (!included(y.label, x.label)) continue;
      auto saved = h;
      h[x.source] = y.source;
      h[x.target] = y.target;
      if (extend(a, b, h, i + 1)) return true;
      h = std::move(saved);
    }
    return false;
  }
};

}  // namespace

std::size_t default_refinement_length(const Ucrpq& g, std::size_t k) {
  std::size_t r = 1;
  for (const auto& d : g.disjuncts)
    for (const auto& a : d.atoms) r = std::max(r, a.label->nfa.num_states());
  return std::max<std::size_t>(1, g.max_atoms() * r * k);
}

void for_each_approximation(const Ucrpq& g, std::size_t k, std::size_t m,
                            const std::function<bool(const ExplicitApproximation&)>& visit, std::size_t budget) {
  if (m == 0) throw InputError("refinement length must be at least 1");
  LabelCanon canon(*g.alphabet);
  search_all(g, k, m, canon, budget, visit);
}

Ucrpq under_approximation(const Ucrpq& g, std::size_t k, std::size_t m, bool prune, std::size_t budget,
                          ApproximationStats* stats) {
  if (m == 0) throw InputError("refinement length must be at least 1");
  LabelCanon canon(*g.alphabet);
  ApproximationStats st;
  std::vector<Crpq> distinct;
  std::unordered_map<std::string, std::vector<std::size_t>> buckets;
  search_all(g, k, m, canon, budget, [&](const ExplicitApproximation& x) {
    ++st.emitted;
    Crpq a = x.alpha;
    a.drop_unused_vars();
    auto& b = buckets[shape_signature(a)];
    for (std::size_t i : b)
      if (is_isomorphic(distinct[i], a)) return true;
    b.push_back(distinct.size());
    distinct.push_back(std::move(a));
    return true;
  });
  st.distinct = distinct.size();

  Ucrpq out;
  out.alphabet = g.alphabet;
  std::vector<bool> drop(distinct.size(), false);
  if (prune) {
    // α_i goes when some α_j provably contains it (the earlier of two such
    // equivalent ones stays), or when an earlier α_j agrees with it both ways
    // under bounded containment, with a bound m + 2 past the longest shortest word
    AtomwiseContainment below;
    auto bounded_equal = [&](const Crpq& a, const Crpq& b) {
      std::size_t reach = 0;
      for (const Crpq* q : {&a, &b})
        for (const auto& x : q->atoms) reach = std::max(reach, shortest_word(x.label->nfa));
      return contained_bounded(as_union(a), as_union(b), reach + m + 2).contained() &&
             contained_bounded(as_union(b), as_union(a), reach + m + 2).contained();
    };
    for (std::size_t i = 0; i < distinct.size(); ++i)
      for (std::size_t j = 0; j < distinct.size() && !drop[i]; ++j) {
        if (i == j || drop[j]) continue;
        if (below(distinct[i], distinct[j])) {
          drop[i] = j < i || !below(distinct[j], distinct[i]);
          continue;
        }
        if (j < i && bounded_equal(distinct[j], distinct[i])) drop[i] = true;
      }
  }
  for (std::size_t i = 0; i < distinct.size(); ++i)
    if (!drop[i]) out.disjuncts.push_back(distinct[i]);
  st.kept = out.disjuncts.size();
  if (stats) *stats = st;
  return out;
}

bool membership_in_app(const Crpq& delta, const Ucrpq& g, std::size_t k, std::size_t m, std::size_t budget) {
  if (delta.num_atoms() > k) return false;
  AlphabetRef alpha = merge_alphabets(g.alphabet, delta.alphabet);
  Ucrpq gg = rebase(g, alpha);
  LabelCanon canon(*alpha);
  Crpq d = canon.canonical(rebase(delta, alpha));
  d.drop_unused_vars();
  bool found = false;
  search_all(gg, k, m, canon, budget, [&](const ExplicitApproximation& x) {
    Crpq a = x.alpha;
    a.drop_unused_vars();
    found = is_isomorphic(a, d);
    return !found;
  });
  return found;
}

std::string to_string(MinimizeResult::Verdict v) {
  switch (v) {
    case MinimizeResult::Verdict::Minimizable: return "minimizable";
    case MinimizeResult::Verdict::NotWithinBounds: return "not-within-bounds";
    case MinimizeResult::Verdict::NotMinimizable: return "not-minimizable";
  }
  return "?";
}

MinimizeResult minimize_ucrpq(const Ucrpq& g, std::size_t k, ContainmentMode mode, std::optional<std::size_t> m,
                              std::size_t max_len) {
  MinimizeResult r;
  r.m = m ? *m : default_refinement_length(g, k);
  r.delta = under_approximation(g, k, r.m);
  r.check = contained(g, r.delta, mode, max_len);
  if (!r.check.contained()) {
    // deduplication may have merged disjuncts that only agree up to a bound
    Ucrpq full = under_approximation(g, k, r.m, false);
    if (full.disjuncts.size() != r.delta.disjuncts.size()) {
      auto again = contained(g, full, mode, max_len);
      if (again.contained()) {
        r.delta = std::move(full);
        r.check = std::move(again);
      }
    }
  }
  if (!r.check.contained())
    r.verdict = MinimizeResult::Verdict::NotMinimizable;
  else if (r.check.complete())
    r.verdict = MinimizeResult::Verdict::Minimizable;
  else
    r.verdict = MinimizeResult::Verdict::NotWithinBounds;
  return r;
}

// ---------------------------------------------------------------------------

bool GammaType::included_in(const GammaType& other) const {
  return std::includes(other.tuples.begin(), other.tuples.end(), tuples.begin(), tuples.end());
}

GammaContext::GammaContext(const Crpq& gamma)
    : parts_(gamma.num_vars() + 1), alphabet_size_(gamma.alphabet->size()) {
  for (const auto& a : gamma.atoms) {
    const Nfa& n = a.label->nfa;
    for (State p = 0; p < n.num_states(); ++p)
      for (State q = 0; q < n.num_states(); ++q) subs_.push_back(sublanguage(n, p, q));
  }
}

ClassDescriptor GammaContext::class_of(const Word& u) const {
  ClassDescriptor c(subs_.size());
  for (std::size_t i = 0; i < subs_.size(); ++i) c[i] = accepts(subs_[i], u);
  return c;
}

GammaType GammaContext::type_of(const Word& u) const {
  if (u.size() > kMaxTypeWord)
    throw ResourceError("γ-types are limited to words of " + std::to_string(kMaxTypeWord) + " letters");
  const std::size_t n = u.size();
  // cls[i][j]: class of u[i, j)
  std::vector<std::vector<ClassDescriptor>> cls(n + 1, std::vector<ClassDescriptor>(n + 1));
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i; j <= n; ++j)
      cls[i][j] = class_of(Word(u.begin() + static_cast<std::ptrdiff_t>(i), u.begin() + static_cast<std::ptrdiff_t>(j)));
  GammaType t;
  std::vector<ClassDescriptor> tuple;
  std::function<void(std::size_t)> rec = [&](std::size_t at) {
    if (!tuple.empty() && at == n) t.tuples.insert(tuple);
    if (tuple.size() == parts_) return;
    for (std::size_t j = at; j <= n; ++j) {
      tuple.push_back(cls[at][j]);
      rec(j);
      tuple.pop_back();
    }
  };
  rec(0);
  return t;
}

Nfa GammaContext::class_automaton(const ClassDescriptor& c, std::size_t cap) const {
  if (c.size() != subs_.size()) throw InputError("class descriptor has the wrong length");
  Nfa r = any_star_nfa(alphabet_size_);
  for (std::size_t i = 0; i < subs_.size(); ++i) r = nfa_intersect(r, c[i] ? subs_[i] : nfa_complement(subs_[i], cap));
  return r;
}

bool gamma_equiv(const Word& u, const Word& v, const Crpq& gamma) {
  GammaContext ctx(gamma);
  return ctx.class_of(u) == ctx.class_of(v);
}

GammaType gamma_type(const Word& u, const Crpq& gamma) { return GammaContext(gamma).type_of(u); }

Nfa class_automaton(const ClassDescriptor& c, const Crpq& gamma, std::size_t cap) {
  return GammaContext(gamma).class_automaton(c, cap);
}

TildeLanguage::TildeLanguage(const Nfa& language, const Crpq& gamma, std::size_t sample_cap) : ctx_(gamma) {
  if (language.alphabet_size() != ctx_.alphabet_size()) throw InputError("language and query alphabets differ");
  for (const auto& u : words_up_to(language, std::min(sample_cap, kMaxTypeWord))) types_.push_back(ctx_.type_of(u));
}

bool TildeLanguage::contains(const Word& z) const {
  for (Symbol s : z)
    if (s >= ctx_.alphabet_size()) return false;
  if (z.size() > kMaxTypeWord) return false;
  GammaType t = ctx_.type_of(z);
  return std::any_of(types_.begin(), types_.end(), [&](const GammaType& u) { return u.included_in(t); });
}

// ---------------------------------------------------------------------------

std::vector<LabelRef> label_pool(const Crpq& gamma, std::size_t concat_cap) {
  const Alphabet& alphabet = *gamma.alphabet;
  LabelCanon canon(alphabet);
  std::vector<LabelRef> pool;
  std::set<const Label*> seen;
  auto add = [&](const LabelRef& l) {
    if (is_empty(l->nfa)) return;
    LabelRef c = canon.get(l);
    if (seen.insert(c.get()).second) pool.push_back(c);
  };
  for (const auto& a : gamma.atoms) {
    const std::size_t n = a.label->nfa.num_states();
    std::vector<std::vector<RegexAst>> sub(n, std::vector<RegexAst>(n));
    for (State p = 0; p < n; ++p)
      for (State q = 0; q < n; ++q) sub[p][q] = sublanguage_ast(a.label->ast, p, q);
    // chains p0 → p1 → … of up to concat_cap sublanguages
    std::function<void(State, std::vector<RegexAst>&)> chain = [&](State p, std::vector<RegexAst>& parts) {
      if (!parts.empty()) add(make_label(make_concat(parts), alphabet));
      if (parts.size() == concat_cap) return;
      for (State q = 0; q < n; ++q) {
        parts.push_back(sub[p][q]);
        chain(q, parts);
        parts.pop_back();
      }
    };
    for (State p = 0; p < n; ++p) {
      std::vector<RegexAst> parts;
      chain(p, parts);
    }
  }
  for (Symbol x = 0; x < alphabet.size(); ++x) add(letter_label(x, alphabet));
  add(any_star_label(alphabet));
  return pool;
}

BruteforceResult minimize_crpq_bruteforce(const Crpq& gamma, std::size_t k, const PoolConfig& config) {
  BruteforceResult r;
  std::vector<LabelRef> pool = label_pool(gamma, config.concat_cap);
  r.pool_size = pool.size();
  Ucrpq left = as_union(gamma);

  // output pattern of γ: distinct output variables become the first vertices
  std::vector<VarId> distinct_outputs;
  std::vector<std::uint32_t> out_pos;
  for (VarId v : gamma.outputs) {
    auto it = std::find(distinct_outputs.begin(), distinct_outputs.end(), v);
    out_pos.push_back(static_cast<std::uint32_t>(it - distinct_outputs.begin()));
    if (it == distinct_outputs.end()) distinct_outputs.push_back(v);
  }
  const std::uint32_t base = static_cast<std::uint32_t>(distinct_outputs.size());

  auto build = [&](const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                   const std::vector<std::size_t>& labels, std::uint32_t fresh) {
    Crpq d;
    d.name = gamma.name;
    d.alphabet = gamma.alphabet;
    for (VarId v : distinct_outputs) d.var(gamma.vars[v]);
    for (std::uint32_t j = 0; j < fresh; ++j) d.fresh_var("z" + std::to_string(j));
    for (auto p : out_pos) d.outputs.push_back(p);
    for (std::size_t i = 0; i < edges.size(); ++i) d.add_atom(edges[i].first, pool[labels[i]], edges[i].second);
    return d;
  };

  auto test = [&](const Crpq& d) {
    if (++r.candidates > config.max_candidates)
      throw ResourceError("pool search exceeded " + std::to_string(config.max_candidates) + " candidates");
    Ucrpq right = as_union(d);
    if (falsify_equivalence(left, right, config.trials, 4, config.seed)) return false;
    EquivalenceVerdict v = equivalent(left, right, ContainmentMode::Auto, config.max_len);
    if (!v.equivalent()) return false;
    r.query = d;
    r.complete = v.complete();
    return true;
  };

  for (std::size_t n = 0; n <= k; ++n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::size_t> labels(n);
    // label choices for a fixed edge list; parallel equal edges take non-decreasing labels
    std::function<bool(std::size_t, std::uint32_t)> label_rec = [&](std::size_t i, std::uint32_t fresh) -> bool {
      if (i == n) return test(build(edges, labels, fresh));
      std::size_t from = i > 0 && edges[i] == edges[i - 1] ? labels[i - 1] : 0;
      for (std::size_t l = from; l < pool.size(); ++l) {
        labels[i] = l;
        if (label_rec(i + 1, fresh)) return true;
      }
      return false;
    };
    // non-decreasing edge lists; fresh vertices are introduced in order
    std::function<bool(std::size_t, std::uint32_t)> edge_rec = [&](std::size_t i, std::uint32_t fresh) -> bool {
      if (i == n) return label_rec(0, fresh);
      std::uint32_t limit = base + fresh;  // first unused fresh vertex
      for (std::uint32_t s = 0; s <= limit; ++s)
        for (std::uint32_t t = 0; t <= limit + (s == limit ? 1u : 0u); ++t) {
          if (!edges.empty() && std::make_pair(s, t) < edges.back()) continue;
          std::uint32_t top = std::max(s, t) + 1;
          std::uint32_t f = std::max(fresh, top > base ? top - base : 0u);
          edges.emplace_back(s, t);
          bool done = edge_rec(i + 1, f);
          edges.pop_back();
          if (done) return true;
        }
      return false;
    };
    if (edge_rec(0, 0)) return r;
  }
  return r;
}

}  // namespace crpq
