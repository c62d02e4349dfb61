#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's automata and search code so that agreement is meaningful.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crpq/automata.hpp"
#include "crpq/evaluation.hpp"
#include "crpq/query.hpp"

namespace oracle {

using crpq::NodeId;
using crpq::RegexAst;
using crpq::Symbol;
using crpq::Word;
using K = RegexAst::Kind;

// ---------------------------------------------------------------------------
// Direct regex matching by splitting the word.

class Matcher {
 public:
  Matcher(const RegexAst& ast, const Word& w) : w_(w) { root_ = &ast; }
  bool run() { return match(*root_, 0, w_.size()); }

 private:
  bool match(const RegexAst& e, std::size_t i, std::size_t j) {
    auto key = std::make_tuple(&e, i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    memo_[key] = false;  // guards star recursion on empty spans
    bool r = compute(e, i, j);
    memo_[key] = r;
    return r;
  }

  bool concat(const std::vector<RegexAst>& c, std::size_t k, std::size_t i, std::size_t j) {
    if (k == c.size()) return i == j;
    for (std::size_t m = i; m <= j; ++m)
      if (match(c[k], i, m) && concat(c, k + 1, m, j)) return true;
    return false;
  }

  bool repeat(const RegexAst& body, std::size_t i, std::size_t j) {
    // one or more nonempty iterations covering [i, j)
    for (std::size_t m = i + 1; m <= j; ++m)
      if (match(body, i, m) && (m == j || repeat(body, m, j))) return true;
    return false;
  }

  bool compute(const RegexAst& e, std::size_t i, std::size_t j) {
    switch (e.kind) {
      case K::Letter: return j == i + 1 && w_[i] == e.symbol;
      case K::AnyLetter: return j == i + 1;
      case K::Epsilon: return i == j;
      case K::Empty: return false;
      case K::Concat: return concat(e.children, 0, i, j);
      case K::Union:
        return std::any_of(e.children.begin(), e.children.end(), [&](const RegexAst& c) { return match(c, i, j); });
      case K::Star: return i == j || repeat(e.children[0], i, j);
      case K::Plus: return (i == j && match(e.children[0], i, j)) || (i < j && repeat(e.children[0], i, j));
      case K::Opt: return i == j || match(e.children[0], i, j);
    }
    return false;
  }

  const Word& w_;
  const RegexAst* root_;
  std::map<std::tuple<const RegexAst*, std::size_t, std::size_t>, bool> memo_;
};

inline bool regex_match(const RegexAst& ast, const Word& w) { return Matcher(ast, w).run(); }

/// All words over `n` letters of length ≤ len.
inline std::vector<Word> all_words(std::size_t n, std::size_t len) {
  std::vector<Word> out{{}};
  std::vector<Word> level{{}};
  for (std::size_t l = 1; l <= len; ++l) {
    std::vector<Word> next;
    for (const auto& w : level)
      for (Symbol a = 0; a < n; ++a) {
        Word x = w;
        x.push_back(a);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brzozowski derivatives with a canonical printed form, for path reachability.

inline bool nullable(const RegexAst& e) {
  switch (e.kind) {
    case K::Epsilon:
    case K::Star:
    case K::Opt: return true;
    case K::Plus: return nullable(e.children[0]);
    case K::Concat: return std::all_of(e.children.begin(), e.children.end(), [](const auto& c) { return nullable(c); });
    case K::Union: return std::any_of(e.children.begin(), e.children.end(), [](const auto& c) { return nullable(c); });
    default: return false;
  }
}

inline std::string show(const RegexAst& e) {
  switch (e.kind) {
    case K::Letter: return "L" + std::to_string(e.symbol);
    case K::AnyLetter: return "A";
    case K::Epsilon: return "E";
    case K::Empty: return "0";
    case K::Star: return "*(" + show(e.children[0]) + ")";
    case K::Plus: return "+(" + show(e.children[0]) + ")";
    case K::Opt: return "?(" + show(e.children[0]) + ")";
    case K::Concat:
    case K::Union: {
      std::string s = e.kind == K::Concat ? "C(" : "U(";
      for (const auto& c : e.children) s += show(c) + ",";
      return s + ")";
    }
  }
  return "";
}

inline RegexAst norm_union(std::vector<RegexAst> parts) {
  std::map<std::string, RegexAst> uniq;
  for (auto& p : parts) {
    if (p.kind == K::Empty) continue;
    if (p.kind == K::Union) {
      for (auto& c : p.children) uniq.emplace(show(c), c);
    } else {
      uniq.emplace(show(p), p);
    }
  }
  if (uniq.empty()) return RegexAst::empty();
  if (uniq.size() == 1) return uniq.begin()->second;
  std::vector<RegexAst> out;
  for (auto& [k, v] : uniq) out.push_back(v);
  return RegexAst::alt(std::move(out));
}

inline RegexAst norm_concat(std::vector<RegexAst> parts) {
  std::vector<RegexAst> out;
  for (auto& p : parts) {
    if (p.kind == K::Empty) return RegexAst::empty();
    if (p.kind == K::Epsilon) continue;
    if (p.kind == K::Concat) {
      for (auto& c : p.children) out.push_back(c);
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) return RegexAst::epsilon();
  if (out.size() == 1) return out[0];
  return RegexAst::concat(std::move(out));
}

inline RegexAst derive(const RegexAst& e, Symbol a) {
  switch (e.kind) {
    case K::Letter: return e.symbol == a ? RegexAst::epsilon() : RegexAst::empty();
    case K::AnyLetter: return RegexAst::epsilon();
    case K::Epsilon:
    case K::Empty: return RegexAst::empty();
    case K::Union: {
      std::vector<RegexAst> d;
      for (const auto& c : e.children) d.push_back(derive(c, a));
      return norm_union(std::move(d));
    }
    case K::Concat: {
      std::vector<RegexAst> rest(e.children.begin() + 1, e.children.end());
      RegexAst tail = norm_concat(rest);
      std::vector<RegexAst> first{derive(e.children[0], a)};
      first.push_back(tail);
      RegexAst left = norm_concat(std::move(first));
      if (!nullable(e.children[0])) return left;
      return norm_union({left, derive(tail, a)});
    }
    case K::Star:
    case K::Plus: return norm_concat({derive(e.children[0], a), RegexAst::star(e.children[0])});
    case K::Opt: return derive(e.children[0], a);
  }
  return RegexAst::empty();
}

/// (u,v) pairs connected by a path whose label matches `ast`.
inline std::set<std::pair<NodeId, NodeId>> reach_pairs(const crpq::GraphDb& db, const RegexAst& ast) {
  std::set<std::pair<NodeId, NodeId>> out;
  std::map<std::string, RegexAst> states;
  for (NodeId u = 0; u < db.num_nodes(); ++u) {
    std::set<std::pair<NodeId, std::string>> seen;
    std::deque<std::pair<NodeId, RegexAst>> queue;
    queue.emplace_back(u, ast);
    seen.emplace(u, show(ast));
    while (!queue.empty()) {
      auto [v, e] = queue.front();
      queue.pop_front();
      if (nullable(e)) out.emplace(u, v);
      for (const auto& ed : db.edges) {
        if (ed.source != v) continue;
        RegexAst d = derive(e, ed.label);
        if (d.kind == K::Empty) continue;
        std::string k = show(d);
        if (seen.emplace(ed.target, k).second) queue.emplace_back(ed.target, d);
      }
    }
  }
  return out;
}

/// Enumerates every total assignment of the query variables.
inline std::set<crpq::Tuple> brute_evaluate(const crpq::Crpq& q, const crpq::GraphDb& db) {
  std::vector<std::set<std::pair<NodeId, NodeId>>> tables;
  for (const auto& a : q.atoms) tables.push_back(reach_pairs(db, a.label->ast));
  std::set<crpq::Tuple> out;
  const std::size_t n = q.num_vars();
  const std::size_t m = db.num_nodes();
  if (m == 0 && n > 0) return out;
  std::vector<NodeId> f(n, 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < q.num_atoms() && ok; ++i)
      ok = tables[i].count({f[q.atoms[i].source], f[q.atoms[i].target]}) > 0;
    if (ok) {
      crpq::Tuple t;
      for (auto v : q.outputs) t.push_back(f[v]);
      out.insert(t);
    }
    std::size_t k = 0;
    while (k < n && ++f[k] == m) f[k++] = 0;
    if (k == n) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive homomorphism check over all |tgt|^|src| maps.

inline bool brute_hom(const crpq::Crpq& src, const crpq::Crpq& tgt) {
  const std::size_t n = src.num_vars(), m = tgt.num_vars();
  if (src.arity() != tgt.arity()) return false;
  if (n == 0) return true;
  if (m == 0) return false;
  std::vector<std::uint32_t> f(n, 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < src.outputs.size() && ok; ++i) ok = f[src.outputs[i]] == tgt.outputs[i];
    for (const auto& a : src.atoms) {
      if (!ok) break;
      ok = std::any_of(tgt.atoms.begin(), tgt.atoms.end(), [&](const crpq::Atom& b) {
        return b.source == f[a.source] && b.target == f[a.target] && b.label->key == a.label->key;
      });
    }
    if (ok) return true;
    std::size_t k = 0;
    while (k < n && ++f[k] == m) f[k++] = 0;
    if (k == n) return false;
  }
}

// ---------------------------------------------------------------------------
// Minors by breadth-first search over deletion and contraction sequences.

struct SimpleGraph {
  std::size_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

inline std::string canonical(const SimpleGraph& g) {
  // smallest edge-list encoding over all vertex permutations (graphs are tiny)
  std::vector<std::uint32_t> perm(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i) perm[i] = i;
  std::string best;
  bool first = true;
  do {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (auto [a, b] : g.edges) e.emplace_back(perm[a], perm[b]);
    std::sort(e.begin(), e.end());
    std::string s = std::to_string(g.n) + ":";
    for (auto [a, b] : e) s += std::to_string(a) + "-" + std::to_string(b) + ",";
    if (first || s < best) best = s;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline bool brute_minor(const SimpleGraph& h, const SimpleGraph& g) {
  const std::string target = canonical(h);
  std::set<std::string> seen;
  std::deque<SimpleGraph> queue{g};
  seen.insert(canonical(g));
  while (!queue.empty()) {
    SimpleGraph cur = queue.front();
    queue.pop_front();
    if (cur.n < h.n || cur.edges.size() < h.edges.size()) continue;
    if (canonical(cur) == target) return true;
    std::vector<SimpleGraph> next;
    for (std::size_t i = 0; i < cur.edges.size(); ++i) {
      SimpleGraph d = cur;
      d.edges.erase(d.edges.begin() + static_cast<std::ptrdiff_t>(i));
      next.push_back(d);
      auto [a, b] = cur.edges[i];
      if (a == b) continue;
      SimpleGraph c;
      c.n = cur.n - 1;
      auto re = [&](std::uint32_t v) {
        if (v == b) v = a;
        return v > b ? v - 1 : v;
      };
      for (std::size_t j = 0; j < cur.edges.size(); ++j)
        if (j != i) c.edges.emplace_back(re(cur.edges[j].first), re(cur.edges[j].second));
      next.push_back(c);
    }
    for (std::uint32_t v = 0; v < cur.n; ++v) {
      bool isolated = std::none_of(cur.edges.begin(), cur.edges.end(),
                                   [&](const auto& e) { return e.first == v || e.second == v; });
      if (!isolated) continue;
      SimpleGraph d;
      d.n = cur.n - 1;
      for (auto [a, b] : cur.edges) d.edges.emplace_back(a > v ? a - 1 : a, b > v ? b - 1 : b);
      next.push_back(d);
    }
    for (auto& x : next)
      if (seen.insert(canonical(x)).second) queue.push_back(std::move(x));
  }
  return false;
}

inline SimpleGraph to_simple(const crpq::Multigraph& m) {
  SimpleGraph g;
  g.n = m.num_vertices();
  for (const auto& e : m.edges) g.edges.emplace_back(e.source, e.target);
  return g;
}

}  // namespace oracle
