#include "crpq/structure.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "crpq/error.hpp"
#include "crpq/morphisms.hpp"

namespace crpq {

namespace {

struct Degrees {
  std::vector<std::size_t> in, out;
  std::vector<std::size_t> in_atom, out_atom;  // last atom seen at each end
};

Degrees degrees(const Crpq& q) {
  Degrees d;
  d.in.assign(q.num_vars(), 0);
  d.out.assign(q.num_vars(), 0);
  d.in_atom.assign(q.num_vars(), 0);
  d.out_atom.assign(q.num_vars(), 0);
  for (std::size_t i = 0; i < q.num_atoms(); ++i) {
    ++d.out[q.atoms[i].source];
    d.out_atom[q.atoms[i].source] = i;
    ++d.in[q.atoms[i].target];
    d.in_atom[q.atoms[i].target] = i;
  }
  return d;
}

void erase_var(Crpq& q, VarId y) {
  q.vars.erase(q.vars.begin() + y);
  auto shift = [y](VarId& v) {
    if (v > y) --v;
  };
  for (auto& v : q.outputs) shift(v);
  for (auto& a : q.atoms) {
    shift(a.source);
    shift(a.target);
  }
}

}  // namespace

std::vector<bool> internal_vars(const Crpq& q) {
  Degrees d = degrees(q);
  std::vector<bool> r(q.num_vars());
  for (VarId v = 0; v < q.num_vars(); ++v) r[v] = !q.is_output(v) && d.in[v] == 1 && d.out[v] == 1;
  return r;
}

Contraction contract_tracked(const Crpq& q) {
  Contraction c;
  c.query = q;
  Crpq& r = c.query;
  c.orig.resize(q.num_vars());
  std::iota(c.orig.begin(), c.orig.end(), VarId{0});
  // group[j]: input atoms merged into current atom j
  std::vector<std::vector<std::size_t>> group(q.num_atoms());
  for (std::size_t i = 0; i < q.num_atoms(); ++i) group[i] = {i};
  for (;;) {
    Degrees d = degrees(r);
    auto internal = internal_vars(r);
    std::optional<VarId> pick;
    for (VarId v = 0; v < r.num_vars() && !pick; ++v)
      if (internal[v] && d.in_atom[v] != d.out_atom[v]) pick = v;
    if (!pick) break;
    VarId y = *pick;
    std::size_t i = d.in_atom[y], j = d.out_atom[y];
    Atom merged{r.atoms[i].source,
                make_label(make_concat({r.atoms[i].label->ast, r.atoms[j].label->ast}), *r.alphabet),
                r.atoms[j].target};
    std::size_t lo = std::min(i, j), hi = std::max(i, j);
    r.atoms[lo] = std::move(merged);
    r.atoms.erase(r.atoms.begin() + static_cast<std::ptrdiff_t>(hi));
    group[lo].insert(group[lo].end(), group[hi].begin(), group[hi].end());
    group.erase(group.begin() + static_cast<std::ptrdiff_t>(hi));
    erase_var(r, y);
    c.orig.erase(c.orig.begin() + y);
  }
  c.contr.assign(q.num_atoms(), 0);
  for (std::size_t j = 0; j < group.size(); ++j)
    for (std::size_t i : group[j]) c.contr[i] = j;
  return c;
}

Crpq contract(const Crpq& q) { return contract_tracked(q).query; }

std::vector<Segment> segments(const Crpq& q) {
  Degrees d = degrees(q);
  auto internal = internal_vars(q);
  std::vector<bool> used(q.num_atoms(), false);
  std::vector<Segment> out;
  for (std::size_t i = 0; i < q.num_atoms(); ++i) {
    if (internal[q.atoms[i].source]) continue;
    Segment s;
    s.start = q.atoms[i].source;
    std::size_t a = i;
    for (;;) {
      used[a] = true;
      s.atoms.push_back(a);
      VarId t = q.atoms[a].target;
      if (!internal[t]) {
        s.end = t;
        break;
      }
      a = d.out_atom[t];
    }
    out.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < q.num_atoms(); ++i) {
    if (used[i]) continue;
    Segment s;
    s.cyclic = true;
    s.start = s.end = q.atoms[i].source;
    std::size_t a = i;
    while (!used[a]) {
      used[a] = true;
      s.atoms.push_back(a);
      a = d.out_atom[q.atoms[a].target];
    }
    out.push_back(std::move(s));
  }
  return out;
}

Multigraph segment_graph(const Crpq& q) {
  auto internal = internal_vars(q);
  Multigraph g;
  std::vector<std::uint32_t> vertex(q.num_vars(), 0);
  for (VarId v = 0; v < q.num_vars(); ++v)
    if (!internal[v]) vertex[v] = g.add_vertex(q.vars[v]);
  std::size_t cycles = 0;
  for (const auto& s : segments(q)) {
    if (s.cyclic) {
      std::uint32_t c = g.add_vertex("cycle" + std::to_string(cycles++));
      g.add_edge(c, c);
    } else {
      g.add_edge(vertex[s.start], vertex[s.end]);
    }
  }
  return g;
}

bool is_minor(const Multigraph& h, const Multigraph& g, std::size_t cap) {
  if (h.edges.size() > g.edges.size() || h.num_vertices() > g.num_vertices()) return false;
  if (g.edges.size() > cap) throw ResourceError("minor test limited to " + std::to_string(cap) + " edges");
  const std::size_t nh = h.num_vertices();
  std::vector<std::vector<std::size_t>> mh(nh, std::vector<std::size_t>(nh, 0));
  for (const auto& e : h.edges) ++mh[e.source][e.target];
  std::vector<std::uint32_t> order(nh);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<std::size_t> deg(nh, 0);
  for (const auto& e : h.edges) ++deg[e.source], ++deg[e.target];
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return deg[a] > deg[b]; });

  const std::size_t m = g.edges.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    // contract the edges in `mask`
    std::vector<std::uint32_t> parent(g.num_vertices());
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t v) {
      return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    std::size_t kept_edges = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        auto a = find(g.edges[i].source), b = find(g.edges[i].target);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      } else {
        ++kept_edges;
      }
    }
    if (kept_edges < h.edges.size()) continue;
    std::vector<std::uint32_t> id(g.num_vertices(), 0);
    std::size_t ng = 0;
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v)
      if (find(v) == v) id[v] = static_cast<std::uint32_t>(ng++);
    if (ng < nh) continue;
    std::vector<std::vector<std::size_t>> mg(ng, std::vector<std::size_t>(ng, 0));
    for (std::size_t i = 0; i < m; ++i)
      if (!(mask >> i & 1)) ++mg[id[find(g.edges[i].source)]][id[find(g.edges[i].target)]];

    std::vector<std::uint32_t> phi(nh, 0);
    std::vector<bool> taken(ng, false);
    std::function<bool(std::size_t)> place = [&](std::size_t k) {
      if (k == nh) return true;
      std::uint32_t u = order[k];
      for (std::uint32_t x = 0; x < ng; ++x) {
        if (taken[x]) continue;
        phi[u] = x;
        bool ok = mh[u][u] <= mg[x][x];
        for (std::size_t j = 0; j < k && ok; ++j) {
          std::uint32_t w = order[j];
          ok = mh[u][w] <= mg[x][phi[w]] && mh[w][u] <= mg[phi[w]][x];
        }
        if (!ok) continue;
        taken[x] = true;
        if (place(k + 1)) return true;
        taken[x] = false;
      }
      return false;
    };
    if (place(0)) return true;
  }
  return false;
}

RedundancyReport remove_redundant_atoms(const Crpq& q, ContainmentMode mode, std::size_t max_len) {
  RedundancyReport rep;
  rep.query = q;
  std::vector<std::size_t> origin(q.num_atoms());
  std::iota(origin.begin(), origin.end(), std::size_t{0});
  std::size_t i = 0;
  while (i < rep.query.num_atoms()) {
    Crpq cand = rep.query;
    const Atom gone = cand.atoms[i];
    cand.atoms.erase(cand.atoms.begin() + static_cast<std::ptrdiff_t>(i));
    // drop endpoints of the removed atom that are now unused, keeping at least one variable
    std::vector<VarId> ends{std::max(gone.source, gone.target)};
    if (gone.source != gone.target) ends.push_back(std::min(gone.source, gone.target));
    for (VarId v : ends) {
      if (cand.num_vars() <= 1 || cand.is_output(v)) continue;
      bool used = false;
      for (const auto& a : cand.atoms) used = used || a.source == v || a.target == v;
      if (!used) erase_var(cand, v);
    }
    RedundancyStep step;
    step.atom = origin[i];
    step.label = gone.label->key;
    step.verdict = contained(as_union(cand), as_union(rep.query), mode, max_len);
    step.removed = step.verdict.contained();
    rep.complete = rep.complete && step.verdict.complete();
    rep.steps.push_back(step);
    if (step.removed) {
      rep.query = std::move(cand);
      origin.erase(origin.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return rep;
}

Certificate check_strong_minimality(const Ucrpq& u, std::size_t disjunct, const std::vector<Word>& words,
                                    std::size_t hom_bound) {
  if (disjunct >= u.disjuncts.size()) throw InputError("no disjunct " + std::to_string(disjunct));
  Certificate c;
  c.expansion = expand(u.disjuncts[disjunct], words);
  c.core = core(c.expansion.cq);
  c.segment_graph = segment_graph(c.core);
  c.segment_count = segments(c.core).size();
  c.bound = hom_bound;
  const Crpq& xi = c.expansion.cq;
  for (std::size_t d = 0; d < u.disjuncts.size() && !c.witness; ++d) {
    const Crpq& g = u.disjuncts[d];
    for_each_word_choice(g, hom_bound, [&](const std::vector<Word>& ws) {
      std::size_t size = 0;
      for (const auto& w : ws) size += w.size();
      if (size > hom_bound) return false;  // sizes only grow from here
      ++c.checked;
      Expansion other = expand(g, ws);
      if (hom_exists(other.cq, xi) && !hom_exists(xi, other.cq)) {
        c.witness = std::move(other);
        c.witness_disjunct = d;
        return false;
      }
      return true;
    });
  }
  c.status = c.witness ? Certificate::Status::Refuted : Certificate::Status::VerifiedUpTo;
  return c;
}

}  // namespace crpq
