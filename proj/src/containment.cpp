#include "crpq/containment.hpp"

#include <algorithm>
#include <numeric>

#include "crpq/error.hpp"

namespace crpq {

std::string to_string(ContainmentStatus s) {
  switch (s) {
    case ContainmentStatus::Contained: return "contained";
    case ContainmentStatus::ContainedUpToBound: return "contained-up-to-bound";
    case ContainmentStatus::NotContained: return "not-contained";
  }
  return {};
}

std::string to_string(ContainmentMode m) {
  switch (m) {
    case ContainmentMode::Auto: return "auto";
    case ContainmentMode::Sre: return "sre";
    case ContainmentMode::SinglePath: return "single-path";
    case ContainmentMode::Bounded: return "bounded";
  }
  return {};
}

ContainmentMode parse_mode(const std::string& name) {
  if (name == "auto") return ContainmentMode::Auto;
  if (name == "sre") return ContainmentMode::Sre;
  if (name == "single-path") return ContainmentMode::SinglePath;
  if (name == "bounded") return ContainmentMode::Bounded;
  throw InputError("unknown containment mode '" + name + "'");
}

bool right_holds(const Ucrpq& right, const GraphDb& db, const Tuple& outputs) {
  for (const auto& d : right.disjuncts) {
    auto pin = pin_outputs(d, outputs);
    if (pin && satisfies(d, db, *pin)) return true;
  }
  return false;
}

namespace {

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
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Canonical database of the expansion choosing `words`, without building the CQ.
CanonicalDb word_database(const Crpq& q, const std::vector<Word>& words) {
  UnionFind uf(q.num_vars());
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i].empty()) uf.unite(q.atoms[i].source, q.atoms[i].target);
  CanonicalDb c;
  c.db.alphabet = q.alphabet;
  std::vector<NodeId> node(q.num_vars());
  for (VarId v = 0; v < q.num_vars(); ++v)
    if (uf.find(v) == v) {
      node[v] = static_cast<NodeId>(c.db.nodes.size());
      c.db.nodes.push_back(q.vars[v]);
    }
  for (VarId v = 0; v < q.num_vars(); ++v) node[v] = node[uf.find(v)];
  for (std::size_t i = 0; i < words.size(); ++i) {
    NodeId prev = node[q.atoms[i].source];
    for (std::size_t j = 0; j < words[i].size(); ++j) {
      NodeId next;
      if (j + 1 == words[i].size()) {
        next = node[q.atoms[i].target];
      } else {
        next = static_cast<NodeId>(c.db.nodes.size());
        c.db.nodes.push_back("");
      }
      c.db.edges.push_back({prev, words[i][j], next});
      prev = next;
    }
  }
  for (VarId v : q.outputs) c.outputs.push_back(node[v]);
  return c;
}

Counterexample make_counterexample(std::size_t disjunct, const Crpq& q, const std::vector<Word>& words) {
  Counterexample cx;
  cx.disjunct = disjunct;
  cx.expansion = expand(q, words);
  CanonicalDb c = canonical_database(cx.expansion);
  cx.db = std::move(c.db);
  cx.outputs = std::move(c.outputs);
  return cx;
}

// First word choice of `q` (per-atom length ≤ max_len) on which `right` fails.
std::optional<std::vector<Word>> search_counterexample(const Crpq& q, const Ucrpq& right, std::size_t max_len,
                                                       std::size_t& checked) {
  std::optional<std::vector<Word>> found;
  for_each_word_choice(q, max_len, [&](const std::vector<Word>& words) {
    ++checked;
    CanonicalDb c = word_database(q, words);
    if (right_holds(right, c.db, c.outputs)) return true;
    found = words;
    return false;
  });
  return found;
}

}  // namespace

ContainmentVerdict contained_bounded(const Ucrpq& left, const Ucrpq& right, std::size_t max_len) {
  ContainmentVerdict v;
  v.mode = ContainmentMode::Bounded;
  v.bound = max_len;
  for (std::size_t d = 0; d < left.disjuncts.size(); ++d) {
    auto words = search_counterexample(left.disjuncts[d], right, max_len, v.checked);
    if (words) {
      v.status = ContainmentStatus::NotContained;
      v.counterexample = make_counterexample(d, left.disjuncts[d], *words);
      return v;
    }
  }
  v.status = ContainmentStatus::ContainedUpToBound;
  return v;
}

// ---------------------------------------------------------------------------
// SRE fragment

namespace {

constexpr std::size_t kMaxAlternatives = 4096;

std::vector<Symbol> all_letters(std::size_t n) {
  std::vector<Symbol> v(n);
  std::iota(v.begin(), v.end(), Symbol{0});
  return v;
}

void push_unique(std::vector<SreFactors>& out, SreFactors f) {
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
}

}  // namespace

std::optional<std::vector<SreFactors>> sre_alternatives(const RegexAst& ast, std::size_t alphabet_size,
                                                        bool allow_any_star) {
  using K = RegexAst::Kind;
  using F = SreFactor::Kind;
  switch (ast.kind) {
    case K::Letter: return std::vector<SreFactors>{{{F::LetterSet, {ast.symbol}}}};
    case K::AnyLetter:
      if (alphabet_size == 0) return std::vector<SreFactors>{};
      return std::vector<SreFactors>{{{F::LetterSet, all_letters(alphabet_size)}}};
    case K::Epsilon: return std::vector<SreFactors>{SreFactors{}};
    case K::Empty: return std::vector<SreFactors>{};
    case K::Union: {
      if (std::all_of(ast.children.begin(), ast.children.end(),
                      [](const RegexAst& c) { return c.kind == K::Letter; })) {
        std::vector<Symbol> ls;
        for (const auto& c : ast.children) ls.push_back(c.symbol);
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        return std::vector<SreFactors>{{{F::LetterSet, ls}}};
      }
      std::vector<SreFactors> out;
      for (const auto& c : ast.children) {
        auto sub = sre_alternatives(c, alphabet_size, allow_any_star);
        if (!sub) return std::nullopt;
        for (auto& s : *sub) push_unique(out, std::move(s));
      }
      return out;
    }
    case K::Concat: {
      std::vector<SreFactors> acc{SreFactors{}};
      for (const auto& c : ast.children) {
        auto sub = sre_alternatives(c, alphabet_size, allow_any_star);
        if (!sub) return std::nullopt;
        std::vector<SreFactors> next;
        for (const auto& a : acc)
          for (const auto& b : *sub) {
            SreFactors f = a;
            f.insert(f.end(), b.begin(), b.end());
            push_unique(next, std::move(f));
            if (next.size() > kMaxAlternatives) throw ResourceError("too many SRE alternatives");
          }
        acc = std::move(next);
      }
      return acc;
    }
    case K::Plus:
    case K::Star: {
      const RegexAst& c = ast.children[0];
      std::vector<SreFactors> out;
      if (ast.kind == K::Star) out.push_back({});
      if (c.kind == K::Letter) {
        out.push_back({{F::Plus, {c.symbol}}});
        return out;
      }
      if (c.kind == K::AnyLetter && allow_any_star) {
        if (ast.kind == K::Star) return std::vector<SreFactors>{{{F::AnyStar, {}}}};
        return std::vector<SreFactors>{{{F::LetterSet, all_letters(alphabet_size)}, {F::AnyStar, {}}}};
      }
      return std::nullopt;
    }
    case K::Opt: {
      auto sub = sre_alternatives(ast.children[0], alphabet_size, allow_any_star);
      if (!sub) return std::nullopt;
      std::vector<SreFactors> out{SreFactors{}};
      for (auto& s : *sub) push_unique(out, std::move(s));
      return out;
    }
  }
  return std::nullopt;
}

namespace {

LabelRef factor_label(const SreFactor& f, const Alphabet& alphabet) {
  switch (f.kind) {
    case SreFactor::Kind::Plus: return make_label(RegexAst::plus(RegexAst::letter(f.letters[0])), alphabet);
    case SreFactor::Kind::AnyStar: return any_star_label(alphabet);
    case SreFactor::Kind::LetterSet: {
      if (f.letters.size() == 1) return letter_label(f.letters[0], alphabet);
      std::vector<RegexAst> ls;
      for (Symbol a : f.letters) ls.push_back(RegexAst::letter(a));
      return make_label(RegexAst::alt(std::move(ls)), alphabet);
    }
  }
  return nullptr;
}

}  // namespace

SreSplit sre_split(const Ucrpq& u, bool left_side) {
  SreSplit out;
  out.query.alphabet = u.alphabet;
  const Alphabet& alphabet = *u.alphabet;
  for (std::size_t d = 0; d < u.disjuncts.size(); ++d) {
    const Crpq& q = u.disjuncts[d];
    std::vector<std::vector<SreFactors>> alts;
    std::size_t combos = 1;
    for (const auto& a : q.atoms) {
      auto al = sre_alternatives(a.label->ast, alphabet.size(), true);
      if (!al) throw FragmentError("label '" + a.label->key + "' is outside the SRE fragment");
      combos *= std::max<std::size_t>(al->size(), 1);
      if (combos > kMaxAlternatives) throw ResourceError("too many SRE alternatives");
      alts.push_back(std::move(*al));
    }
    if (std::any_of(alts.begin(), alts.end(), [](const auto& a) { return a.empty(); })) continue;  // empty language

    std::vector<std::size_t> pick(q.num_atoms(), 0);
    for (;;) {
      UnionFind uf(q.num_vars());
      for (std::size_t i = 0; i < q.num_atoms(); ++i)
        if (alts[i][pick[i]].empty()) uf.unite(q.atoms[i].source, q.atoms[i].target);
      Crpq s;
      s.name = q.name;
      s.alphabet = q.alphabet;
      std::vector<VarId> rep(q.num_vars());
      for (VarId v = 0; v < q.num_vars(); ++v)
        if (uf.find(v) == v) rep[v] = s.var(q.vars[v]);
      for (VarId v = 0; v < q.num_vars(); ++v) rep[v] = rep[uf.find(v)];
      for (VarId v : q.outputs) s.outputs.push_back(rep[v]);
      std::vector<std::vector<std::size_t>> fa(q.num_atoms());
      for (std::size_t i = 0; i < q.num_atoms(); ++i) {
        const SreFactors& seq = alts[i][pick[i]];
        VarId prev = rep[q.atoms[i].source];
        for (std::size_t j = 0; j < seq.size(); ++j) {
          VarId next = j + 1 == seq.size() ? rep[q.atoms[i].target]
                                           : s.fresh_var("t" + std::to_string(i) + "_" + std::to_string(j + 1));
          if (left_side && seq[j].kind == SreFactor::Kind::AnyStar) {
            out.relaxed = true;
          } else {
            fa[i].push_back(s.num_atoms());
            s.add_atom(prev, factor_label(seq[j], alphabet), next);
          }
          prev = next;
        }
      }
      out.query.disjuncts.push_back(std::move(s));
      out.source.push_back(d);
      out.factor_atoms.push_back(std::move(fa));

      bool done = true;
      for (std::size_t i = q.num_atoms(); i-- > 0;) {
        if (++pick[i] < alts[i].size()) {
          done = false;
          break;
        }
        pick[i] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

bool sre_applicable(const Ucrpq& left, const Ucrpq& right) {
  auto ok = [](const Ucrpq& u) {
    for (const auto& d : u.disjuncts)
      for (const auto& a : d.atoms)
        if (!sre_alternatives(a.label->ast, u.alphabet->size(), true)) return false;
    return true;
  };
  try {
    return ok(left) && ok(right);
  } catch (const ResourceError&) {
    return false;
  }
}

std::size_t sre_bound(const Ucrpq& right) { return sre_split(right, false).query.max_atoms() + 1; }

ContainmentVerdict contained_sre(const Ucrpq& left, const Ucrpq& right, std::size_t fallback_len) {
  SreSplit l = sre_split(left, true);
  SreSplit r = sre_split(right, false);
  ContainmentVerdict v;
  v.mode = ContainmentMode::Sre;
  v.bound = r.query.max_atoms() + 1;
  for (std::size_t d = 0; d < l.query.disjuncts.size(); ++d) {
    const Crpq& split = l.query.disjuncts[d];
    auto words = search_counterexample(split, r.query, v.bound, v.checked);
    if (!words) continue;
    if (l.relaxed) return contained_bounded(left, right, fallback_len);
    const Crpq& orig = left.disjuncts[l.source[d]];
    std::vector<Word> orig_words(orig.num_atoms());
    for (std::size_t i = 0; i < orig.num_atoms(); ++i)
      for (std::size_t j : l.factor_atoms[d][i]) orig_words[i].insert(orig_words[i].end(), (*words)[j].begin(), (*words)[j].end());
    v.status = ContainmentStatus::NotContained;
    v.counterexample = make_counterexample(l.source[d], orig, orig_words);
    return v;
  }
  v.status = ContainmentStatus::Contained;
  return v;
}

// ---------------------------------------------------------------------------
// Single path against a bundle of parallel atoms

bool contained_single_path(const Nfa& k, const std::vector<Nfa>& ls) {
  if (has_epsilon(k)) throw InputError("single-path containment requires an ε-free left language");
  const std::size_t n = k.alphabet_size();
  Nfa inter = any_star_nfa(n);
  for (const auto& l : ls) {
    if (has_epsilon(l)) throw InputError("single-path containment requires ε-free right languages");
    inter = nfa_intersect(inter, l);
  }
  Nfa infix = nfa_concat(nfa_concat(any_star_nfa(n), inter), any_star_nfa(n));
  return language_inclusion(k, infix);
}

namespace {

// Which endpoints of the left atom are outputs; nullopt when the right side
// does not pin the matching endpoints at the same positions.
std::optional<std::pair<bool, bool>> pinned_ends(const Crpq& l, const Crpq& r) {
  if (l.arity() != r.arity()) return std::nullopt;
  bool src = false, tgt = false;
  for (std::size_t i = 0; i < l.arity(); ++i) {
    bool at_src = l.outputs[i] == l.atoms[0].source;
    if ((at_src ? r.atoms[0].source : r.atoms[0].target) != r.outputs[i]) return std::nullopt;
    (at_src ? src : tgt) = true;
  }
  return std::pair{src, tgt};
}

}  // namespace

bool single_path_applicable(const Ucrpq& left, const Ucrpq& right) {
  if (left.disjuncts.size() != 1 || right.disjuncts.size() != 1) return false;
  const Crpq& l = left.disjuncts[0];
  const Crpq& r = right.disjuncts[0];
  if (l.num_atoms() != 1 || l.num_vars() != 2 || r.num_vars() != 2) return false;
  if (l.atoms[0].source == l.atoms[0].target || has_epsilon(l.atoms[0].label->nfa)) return false;
  if (r.atoms.empty()) return false;
  for (const auto& a : r.atoms)
    if (a.source != r.atoms[0].source || a.target != r.atoms[0].target || a.source == a.target ||
        has_epsilon(a.label->nfa))
      return false;
  return pinned_ends(l, r).has_value();
}

namespace {

ContainmentVerdict single_path_verdict(const Ucrpq& left, const Ucrpq& right) {
  const Crpq& l = left.disjuncts[0];
  const Crpq& r = right.disjuncts[0];
  const std::size_t n = left.alphabet->size();
  Nfa inter = any_star_nfa(n);
  for (const auto& a : r.atoms) inter = nfa_intersect(inter, a.label->nfa);
  // a pinned endpoint anchors the right atoms at that end of the path
  auto [src, tgt] = *pinned_ends(l, r);
  Nfa infix = inter;
  if (!src) infix = nfa_concat(any_star_nfa(n), infix);
  if (!tgt) infix = nfa_concat(infix, any_star_nfa(n));
  InclusionResult inc = check_inclusion(l.atoms[0].label->nfa, infix);
  ContainmentVerdict v;
  v.mode = ContainmentMode::SinglePath;
  if (inc.included) {
    v.status = ContainmentStatus::Contained;
  } else {
    v.status = ContainmentStatus::NotContained;
    v.counterexample = make_counterexample(0, l, {*inc.witness});
    v.bound = inc.witness->size();
  }
  return v;
}

}  // namespace

ContainmentVerdict contained(const Ucrpq& left, const Ucrpq& right, ContainmentMode mode, std::size_t max_len) {
  switch (mode) {
    case ContainmentMode::Sre: return contained_sre(left, right, max_len);
    case ContainmentMode::SinglePath:
      if (!single_path_applicable(left, right)) throw FragmentError("instance is not of the single-path shape");
      return single_path_verdict(left, right);
    case ContainmentMode::Bounded: return contained_bounded(left, right, max_len);
    case ContainmentMode::Auto: break;
  }
  if (sre_applicable(left, right)) {
    try {
      ContainmentVerdict v = contained_sre(left, right, max_len);
      if (v.mode == ContainmentMode::Sre || !single_path_applicable(left, right)) return v;
    } catch (const ResourceError&) {
    }
  }
  if (single_path_applicable(left, right)) {
    try {
      return single_path_verdict(left, right);
    } catch (const ResourceError&) {
    }
  }
  return contained_bounded(left, right, max_len);
}

EquivalenceVerdict equivalent(const Ucrpq& a, const Ucrpq& b, ContainmentMode mode, std::size_t max_len) {
  return {contained(a, b, mode, max_len), contained(b, a, mode, max_len)};
}

GraphDb random_graphdb(const AlphabetRef& alphabet, std::size_t max_nodes, std::mt19937_64& rng) {
  GraphDb db;
  db.alphabet = alphabet;
  std::size_t n = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(max_nodes, 1))(rng);
  for (std::size_t i = 0; i < n; ++i) db.add_node("u" + std::to_string(i));
  double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
  std::bernoulli_distribution coin(density);
  for (NodeId s = 0; s < n; ++s)
    for (Symbol a = 0; a < alphabet->size(); ++a)
      for (NodeId t = 0; t < n; ++t)
        if (coin(rng)) db.add_edge(s, a, t);
  return db;
}

std::optional<Disagreement> falsify_equivalence(const Ucrpq& a, const Ucrpq& b, std::size_t trials,
                                                std::size_t db_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    GraphDb db = random_graphdb(a.alphabet, db_size, rng);
    auto ra = evaluate_union(a, db);
    auto rb = evaluate_union(b, db);
    if (ra == rb) continue;
    Disagreement d;
    d.trial = t;
    for (const auto& x : ra)
      if (!rb.count(x)) {
        d.tuple = x;
        d.in_left = true;
        break;
      }
    if (!d.in_left)
      for (const auto& x : rb)
        if (!ra.count(x)) {
          d.tuple = x;
          break;
        }
    d.db = std::move(db);
    return d;
  }
  return std::nullopt;
}

}  // namespace crpq
