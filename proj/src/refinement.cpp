#include "crpq/refinement.hpp"

#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "crpq/error.hpp"

namespace crpq {

namespace {

struct SubLabels {
  const Crpq& q;
  const Label& label;
  std::map<std::pair<State, State>, LabelRef> cache;

  LabelRef get(State p, State r) {
    auto it = cache.find({p, r});
    if (it != cache.end()) return it->second;
    LabelRef l = make_label(sublanguage_ast(label.ast, p, r), *q.alphabet);
    cache.emplace(std::make_pair(p, r), l);
    return l;
  }
};

void enumerate_chains(const Nfa& nfa, std::size_t length, std::vector<State>& seq,
                      const std::vector<std::vector<bool>>& nonempty, std::vector<std::vector<State>>& out) {
  if (seq.size() == length + 1) {
    if (nfa.is_final(seq.back())) out.push_back(seq);
    return;
  }
  for (State r = 0; r < nfa.num_states(); ++r) {
    if (!nonempty[seq.back()][r]) continue;
    seq.push_back(r);
    enumerate_chains(nfa, length, seq, nonempty, out);
    seq.pop_back();
  }
}

struct UnionFind {
  std::vector<VarId> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), VarId{0}); }
  VarId find(VarId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(VarId a, VarId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

std::vector<AtomRefinement> atom_refinements(const Crpq& q, std::size_t i, std::size_t m) {
  const Label& label = *q.atoms.at(i).label;
  const Nfa& nfa = label.nfa;
  const std::size_t n = nfa.num_states();
  std::vector<AtomRefinement> out;
  if (has_epsilon(nfa)) out.push_back({i, true, {}});

  std::vector<std::vector<bool>> nonempty(n, std::vector<bool>(n, false));
  for (State p = 0; p < n; ++p)
    for (State r = 0; r < n; ++r) nonempty[p][r] = !is_empty(sublanguage(nfa, p, r));

  SubLabels subs{q, label, {}};
  std::set<std::vector<std::tuple<int, State, State>>> seen;
  for (std::size_t len = 1; len <= m; ++len) {
    std::vector<std::vector<State>> seqs;
    for (State s : nfa.initial_states()) {
      std::vector<State> seq{s};
      enumerate_chains(nfa, len, seq, nonempty, seqs);
    }
    std::sort(seqs.begin(), seqs.end());
    for (const auto& seq : seqs) {
      // options[j]: -1 for the sublanguage, otherwise a letter with seq[j] -a-> seq[j+1]
      std::vector<std::vector<int>> options(len);
      for (std::size_t j = 0; j < len; ++j) {
        options[j].push_back(-1);
        for (Symbol a = 0; a < nfa.alphabet_size(); ++a) {
          const auto& succ = nfa.successors(seq[j], a);
          if (std::binary_search(succ.begin(), succ.end(), seq[j + 1])) options[j].push_back(static_cast<int>(a));
        }
      }
      std::vector<std::size_t> pick(len, 0);
      for (;;) {
        std::vector<std::tuple<int, State, State>> key;
        AtomRefinement r{i, false, {}};
        for (std::size_t j = 0; j < len; ++j) {
          int o = options[j][pick[j]];
          if (o < 0) {
            key.emplace_back(-1, seq[j], seq[j + 1]);
            r.steps.push_back({seq[j], seq[j + 1], std::nullopt, subs.get(seq[j], seq[j + 1])});
          } else {
            key.emplace_back(o, 0, 0);
            r.steps.push_back({seq[j], seq[j + 1], static_cast<Symbol>(o), letter_label(static_cast<Symbol>(o), *q.alphabet)});
          }
        }
        if (seen.insert(std::move(key)).second) out.push_back(std::move(r));
        bool done = true;
        for (std::size_t j = len; j-- > 0;) {
          if (++pick[j] < options[j].size()) {
            done = false;
            break;
          }
          pick[j] = 0;
        }
        if (done) break;
      }
    }
  }
  return out;
}

Crpq apply_refinements(const Crpq& q, const std::vector<AtomRefinement>& choice) {
  if (choice.size() != q.num_atoms()) throw InputError("one refinement per atom is required");
  UnionFind uf(q.num_vars());
  for (std::size_t i = 0; i < choice.size(); ++i)
    if (choice[i].equality) uf.unite(q.atoms[i].source, q.atoms[i].target);

  Crpq r;
  r.name = q.name;
  r.alphabet = q.alphabet;
  std::vector<VarId> remap(q.num_vars());
  for (VarId v = 0; v < q.num_vars(); ++v)
    if (uf.find(v) == v) remap[v] = r.var(q.vars[v]);
  for (VarId v = 0; v < q.num_vars(); ++v) remap[v] = remap[uf.find(v)];
  for (VarId v : q.outputs) r.outputs.push_back(remap[v]);
  for (std::size_t i = 0; i < choice.size(); ++i) {
    const auto& c = choice[i];
    if (c.equality) continue;
    VarId prev = remap[q.atoms[i].source];
    for (std::size_t j = 0; j < c.steps.size(); ++j) {
      VarId next = j + 1 == c.steps.size() ? remap[q.atoms[i].target]
                                           : r.fresh_var("t" + std::to_string(i) + "_" + std::to_string(j + 1));
      r.add_atom(prev, c.steps[j].label, next);
      prev = next;
    }
  }
  return r;
}

void for_each_refinement(const Crpq& q, std::size_t m, const std::function<bool(const Crpq&)>& visit) {
  std::vector<std::vector<AtomRefinement>> per_atom;
  for (std::size_t i = 0; i < q.num_atoms(); ++i) {
    per_atom.push_back(atom_refinements(q, i, m));
    if (per_atom.back().empty()) return;
  }
  std::vector<AtomRefinement> choice(q.num_atoms());
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == q.num_atoms()) return visit(apply_refinements(q, choice));
    for (const auto& r : per_atom[i]) {
      choice[i] = r;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  rec(0);
}

Expansion expand(const Crpq& q, const std::vector<Word>& words) {
  if (words.size() != q.num_atoms()) throw InputError("expected one word per atom");
  UnionFind uf(q.num_vars());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!accepts(q.atoms[i].label->nfa, words[i]))
      throw InputError("word '" + q.alphabet->format_word(words[i]) + "' is not in the language of atom " +
                       std::to_string(i));
    if (words[i].empty()) uf.unite(q.atoms[i].source, q.atoms[i].target);
  }
  Expansion e;
  e.words = words;
  Crpq& r = e.cq;
  r.name = q.name;
  r.alphabet = q.alphabet;
  e.var_map.assign(q.num_vars(), 0);
  for (VarId v = 0; v < q.num_vars(); ++v)
    if (uf.find(v) == v) e.var_map[v] = r.var(q.vars[v]);
  for (VarId v = 0; v < q.num_vars(); ++v) e.var_map[v] = e.var_map[uf.find(v)];
  for (VarId v : q.outputs) r.outputs.push_back(e.var_map[v]);
  std::vector<LabelRef> letters(q.alphabet->size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    VarId prev = e.var_map[q.atoms[i].source];
    for (std::size_t j = 0; j < words[i].size(); ++j) {
      VarId next = j + 1 == words[i].size() ? e.var_map[q.atoms[i].target]
                                            : r.fresh_var("t" + std::to_string(i) + "_" + std::to_string(j + 1));
      Symbol a = words[i][j];
      if (!letters[a]) letters[a] = letter_label(a, *q.alphabet);
      r.add_atom(prev, letters[a], next);
      prev = next;
    }
  }
  return e;
}

void for_each_word_choice(const Crpq& q, std::size_t max_len,
                          const std::function<bool(const std::vector<Word>&)>& visit) {
  const std::size_t n = q.num_atoms();
  // by_len[i][l]: words of atom i with length l
  std::vector<std::vector<std::vector<Word>>> by_len(n, std::vector<std::vector<Word>>(max_len + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (auto& w : words_up_to(q.atoms[i].label->nfa, max_len)) by_len[i][w.size()].push_back(std::move(w));
  std::vector<std::size_t> min_len(n + 1, 0), max_tail(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (std::size_t l = 0; l <= max_len; ++l)
      if (!by_len[i][l].empty()) {
        lo = std::min(lo, l);
        hi = l;
      }
    if (lo == SIZE_MAX) return;  // an atom without words in range
    min_len[i] = min_len[i + 1] + lo;
    max_tail[i] = max_tail[i + 1] + hi;
  }
  std::vector<Word> choice(n);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t budget) {
    if (i == n) return budget == 0 ? visit(choice) : true;
    for (std::size_t l = 0; l <= std::min(budget, max_len); ++l) {
      if (by_len[i][l].empty()) continue;
      std::size_t rest = budget - l;
      if (rest < min_len[i + 1] || rest > max_tail[i + 1]) continue;
      for (const auto& w : by_len[i][l]) {
        choice[i] = w;
        if (!rec(i + 1, rest)) return false;
      }
    }
    return true;
  };
  for (std::size_t total = min_len[0]; total <= max_tail[0]; ++total)
    if (!rec(0, total)) return;
}

void for_each_expansion(const Crpq& q, std::size_t max_len, const std::function<bool(const Expansion&)>& visit) {
  for_each_word_choice(q, max_len, [&](const std::vector<Word>& words) { return visit(expand(q, words)); });
}

CanonicalDb canonical_database(const Crpq& cq) {
  CanonicalDb c;
  c.db.alphabet = cq.alphabet;
  c.db.nodes = cq.vars;
  for (std::size_t i = 0; i < cq.num_atoms(); ++i) {
    auto a = cq.atom_letter(i);
    if (!a) throw InputError("canonical database requires a conjunctive query");
    c.db.add_edge(cq.atoms[i].source, *a, cq.atoms[i].target);
  }
  c.outputs.assign(cq.outputs.begin(), cq.outputs.end());
  return c;
}

}  // namespace crpq
