#include "crpq/morphisms.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace crpq {

std::uint32_t LabelInterner::id(const std::string& key) {
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (keys_[i] == key) return static_cast<std::uint32_t>(i);
  keys_.push_back(key);
  return static_cast<std::uint32_t>(keys_.size() - 1);
}

LabeledGraph to_labeled_graph(const Crpq& q, LabelInterner& interner) {
  LabeledGraph g;
  g.num_vertices = q.num_vars();
  for (const auto& a : q.atoms) g.edges.push_back({a.source, interner.id(a.label->key), a.target});
  g.outputs.assign(q.outputs.begin(), q.outputs.end());
  return g;
}

LabeledGraph to_labeled_graph(const GraphDb& db, LabelInterner& interner, const std::vector<NodeId>& outputs) {
  LabeledGraph g;
  g.num_vertices = db.num_nodes();
  for (const auto& e : db.edges) g.edges.push_back({e.source, interner.id(db.alphabet->name(e.label)), e.target});
  g.outputs = outputs;
  return g;
}

namespace {

using Domain = std::vector<char>;

class HomSearch {
 public:
  HomSearch(const LabeledGraph& src, const LabeledGraph& tgt, const HomOptions& opt)
      : src_(src), tgt_(tgt), opt_(opt) {
    std::uint32_t labels = 0;
    for (const auto& e : src.edges) labels = std::max(labels, e.label + 1);
    for (const auto& e : tgt.edges) labels = std::max(labels, e.label + 1);
    out_.assign(labels, std::vector<std::vector<std::uint32_t>>(tgt.num_vertices));
    in_.assign(labels, std::vector<std::vector<std::uint32_t>>(tgt.num_vertices));
    for (const auto& e : tgt.edges) {
      out_[e.label][e.source].push_back(e.target);
      in_[e.label][e.target].push_back(e.source);
      ++tgt_mult_[{e.source, e.label, e.target}];
    }
    incident_.resize(src.num_vertices);
    for (std::size_t i = 0; i < src.edges.size(); ++i) {
      incident_[src.edges[i].source].push_back(i);
      if (src.edges[i].target != src.edges[i].source) incident_[src.edges[i].target].push_back(i);
    }
  }

  std::optional<Hom> run() {
    const std::size_t n = src_.num_vertices;
    const std::size_t m = tgt_.num_vertices;
    if (n == 0) return check_leaf({}) ? std::optional<Hom>(Hom{}) : std::nullopt;
    if (m == 0) return std::nullopt;
    if (opt_.injective && n > m) return std::nullopt;
    std::vector<Domain> dom(n, Domain(m, 1));
    auto restrict_to = [&](std::uint32_t v, std::uint32_t w) {
      if (w >= m) return false;
      for (std::uint32_t x = 0; x < m; ++x)
        if (x != w) dom[v][x] = 0;
      return dom[v][w] != 0;
    };
    for (std::uint32_t v = 0; v < opt_.pin.size() && v < n; ++v)
      if (opt_.pin[v] != kFree && !restrict_to(v, opt_.pin[v])) return std::nullopt;
    if (opt_.respect_outputs) {
      if (src_.outputs.size() != tgt_.outputs.size()) return std::nullopt;
      for (std::size_t i = 0; i < src_.outputs.size(); ++i)
        if (!restrict_to(src_.outputs[i], tgt_.outputs[i])) return std::nullopt;
    }
    for (const auto& e : src_.edges) {
      if (e.source != e.target) continue;
      for (std::uint32_t w = 0; w < m; ++w)
        if (dom[e.source][w] && !has_edge(w, e.label, w)) dom[e.source][w] = 0;
    }
    if (!propagate(dom, all_edges())) return std::nullopt;
    std::vector<char> assigned(n, 0);
    if (search(dom, assigned)) return result_;
    return std::nullopt;
  }

 private:
  bool has_edge(std::uint32_t u, std::uint32_t l, std::uint32_t v) const {
    if (l >= out_.size()) return false;
    const auto& s = out_[l][u];
    return std::find(s.begin(), s.end(), v) != s.end();
  }

  std::deque<std::size_t> all_edges() const {
    std::deque<std::size_t> q;
    for (std::size_t i = 0; i < src_.edges.size(); ++i) q.push_back(i);
    return q;
  }

  // Removes unsupported values along one endpoint; true if `dom[var]` changed.
  bool revise(std::vector<Domain>& dom, std::uint32_t var, std::uint32_t other, std::uint32_t label, bool forward) {
    bool changed = false;
    const std::size_t m = tgt_.num_vertices;
    for (std::uint32_t w = 0; w < m; ++w) {
      if (!dom[var][w]) continue;
      bool ok = false;
      if (label < out_.size()) {
        const auto& nb = forward ? out_[label][w] : in_[label][w];
        for (std::uint32_t x : nb)
          if (dom[other][x]) {
            ok = true;
            break;
          }
      }
      if (!ok) {
        dom[var][w] = 0;
        changed = true;
      }
    }
    return changed;
  }

  bool propagate(std::vector<Domain>& dom, std::deque<std::size_t> queue) {
    std::vector<char> queued(src_.edges.size(), 0);
    for (std::size_t i : queue) queued[i] = 1;
    auto touch = [&](std::uint32_t v) {
      for (std::size_t i : incident_[v])
        if (!queued[i]) {
          queued[i] = 1;
          queue.push_back(i);
        }
    };
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      queued[i] = 0;
      const auto& e = src_.edges[i];
      if (e.source == e.target) continue;
      if (revise(dom, e.source, e.target, e.label, true)) {
        if (empty(dom[e.source])) return false;
        touch(e.source);
      }
      if (revise(dom, e.target, e.source, e.label, false)) {
        if (empty(dom[e.target])) return false;
        touch(e.target);
      }
    }
    return true;
  }

  static bool empty(const Domain& d) { return std::find(d.begin(), d.end(), 1) == d.end(); }
  static std::size_t count(const Domain& d) { return static_cast<std::size_t>(std::count(d.begin(), d.end(), 1)); }

  bool check_leaf(const std::vector<std::uint32_t>& map) const {
    if (opt_.accept && !opt_.accept(Hom{map})) return false;
    if (!opt_.injective) return true;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::size_t> need;
    for (const auto& e : src_.edges) ++need[{map[e.source], e.label, map[e.target]}];
    for (const auto& [k, c] : need) {
      auto it = tgt_mult_.find(k);
      if (it == tgt_mult_.end() || it->second < c) return false;
    }
    return true;
  }

  bool search(std::vector<Domain>& dom, std::vector<char>& assigned) {
    const std::size_t n = src_.num_vertices;
    std::size_t pick = n;
    std::size_t best = SIZE_MAX;
    for (std::size_t v = 0; v < n; ++v) {
      if (assigned[v]) continue;
      std::size_t c = count(dom[v]);
      if (c < best) {
        best = c;
        pick = v;
      }
    }
    if (pick == n) {
      std::vector<std::uint32_t> map(n);
      for (std::size_t v = 0; v < n; ++v)
        map[v] = static_cast<std::uint32_t>(std::find(dom[v].begin(), dom[v].end(), 1) - dom[v].begin());
      if (!check_leaf(map)) return false;
      result_.map = std::move(map);
      return true;
    }
    const std::size_t m = tgt_.num_vertices;
    for (std::uint32_t w = 0; w < m; ++w) {
      if (!dom[pick][w]) continue;
      std::vector<Domain> next = dom;
      for (std::uint32_t x = 0; x < m; ++x) next[pick][x] = x == w;
      bool ok = true;
      if (opt_.injective) {
        for (std::size_t v = 0; v < n && ok; ++v) {
          if (v == pick) continue;
          next[v][w] = 0;
          if (empty(next[v])) ok = false;
        }
      }
      std::deque<std::size_t> q(incident_[pick].begin(), incident_[pick].end());
      if (opt_.injective)
        for (std::size_t i = 0; i < src_.edges.size(); ++i) q.push_back(i);
      if (!ok || !propagate(next, std::move(q))) continue;
      assigned[pick] = 1;
      if (search(next, assigned)) return true;
      assigned[pick] = 0;
    }
    return false;
  }

  const LabeledGraph& src_;
  const LabeledGraph& tgt_;
  const HomOptions& opt_;
  std::vector<std::vector<std::vector<std::uint32_t>>> out_, in_;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::size_t> tgt_mult_;
  std::vector<std::vector<std::size_t>> incident_;
  Hom result_;
};

}  // namespace

std::optional<Hom> find_hom(const LabeledGraph& src, const LabeledGraph& tgt, const HomOptions& options) {
  return HomSearch(src, tgt, options).run();
}

bool is_valid_hom(const Hom& h, const LabeledGraph& src, const LabeledGraph& tgt) {
  if (h.map.size() != src.num_vertices) return false;
  for (auto w : h.map)
    if (w >= tgt.num_vertices) return false;
  for (const auto& e : src.edges) {
    bool found = std::any_of(tgt.edges.begin(), tgt.edges.end(), [&](const LabeledGraph::Edge& f) {
      return f.source == h.map[e.source] && f.label == e.label && f.target == h.map[e.target];
    });
    if (!found) return false;
  }
  return true;
}

bool is_strong_onto(const Hom& h, const LabeledGraph& src, const LabeledGraph& tgt) {
  for (const auto& f : tgt.edges) {
    bool hit = std::any_of(src.edges.begin(), src.edges.end(), [&](const LabeledGraph::Edge& e) {
      return f.source == h.map[e.source] && f.label == e.label && f.target == h.map[e.target];
    });
    if (!hit) return false;
  }
  return true;
}

std::optional<Hom> find_hom(const Crpq& src, const Crpq& tgt) {
  LabelInterner in;
  return find_hom(to_labeled_graph(src, in), to_labeled_graph(tgt, in));
}

std::optional<Hom> find_strong_onto_hom(const Crpq& src, const Crpq& tgt) {
  LabelInterner in;
  LabeledGraph s = to_labeled_graph(src, in), t = to_labeled_graph(tgt, in);
  HomOptions opt;
  opt.accept = [&](const Hom& h) { return is_strong_onto(h, s, t); };
  return find_hom(s, t, opt);
}

bool hom_exists(const Crpq& src, const Crpq& tgt) { return find_hom(src, tgt).has_value(); }

bool hom_equivalent(const Crpq& p, const Crpq& q) { return hom_exists(p, q) && hom_exists(q, p); }

std::optional<Hom> find_embedding(const Crpq& src, const Crpq& tgt) {
  LabelInterner in;
  HomOptions opt;
  opt.injective = true;
  return find_hom(to_labeled_graph(src, in), to_labeled_graph(tgt, in), opt);
}

bool is_isomorphic(const Crpq& p, const Crpq& q) {
  if (p.num_vars() != q.num_vars() || p.num_atoms() != q.num_atoms() || p.arity() != q.arity()) return false;
  return find_embedding(p, q).has_value();
}

Crpq core(const Crpq& q) {
  Crpq cur = q;
  {
    Crpq trimmed = cur;
    trimmed.drop_unused_vars();
    if (trimmed.num_vars() != cur.num_vars() && hom_exists(cur, trimmed)) cur = std::move(trimmed);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < cur.num_atoms(); ++i) {
      Crpq smaller = cur;
      smaller.atoms.erase(smaller.atoms.begin() + static_cast<std::ptrdiff_t>(i));
      smaller.drop_unused_vars();
      if (hom_exists(cur, smaller)) {
        cur = std::move(smaller);
        changed = true;
        break;
      }
    }
  }
  return cur;
}

}  // namespace crpq
