#include "crpq/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <json.hpp>

#include "crpq/error.hpp"

namespace crpq {

LabelRef make_label(RegexAst ast, const Alphabet& alphabet) {
  auto label = std::make_shared<Label>();
  label->nfa = compile_nfa(ast, alphabet.size());
  label->key = to_string(ast, alphabet);
  label->ast = std::move(ast);
  return label;
}

LabelRef letter_label(Symbol a, const Alphabet& alphabet) {
  return make_label(RegexAst::letter(a), alphabet);
}

LabelRef any_star_label(const Alphabet& alphabet) {
  return make_label(RegexAst::star(RegexAst::any()), alphabet);
}

// ---------------------------------------------------------------------------
// Crpq / Ucrpq

VarId Crpq::var(const std::string& n) {
  if (auto v = find_var(n)) return *v;
  vars.push_back(n);
  return static_cast<VarId>(vars.size() - 1);
}

std::optional<VarId> Crpq::find_var(std::string_view n) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == n) return static_cast<VarId>(i);
  return std::nullopt;
}

VarId Crpq::fresh_var(const std::string& hint) {
  std::string n = hint;
  for (int i = 1; find_var(n); ++i) n = hint + "_" + std::to_string(i);
  vars.push_back(n);
  return static_cast<VarId>(vars.size() - 1);
}

bool Crpq::is_output(VarId v) const {
  return std::find(outputs.begin(), outputs.end(), v) != outputs.end();
}

std::optional<Symbol> Crpq::atom_letter(std::size_t i) const {
  const RegexAst& ast = atoms.at(i).label->ast;
  if (ast.kind == RegexAst::Kind::Letter) return ast.symbol;
  return std::nullopt;
}

bool Crpq::is_cq() const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (!atom_letter(i)) return false;
  return true;
}

void Crpq::drop_unused_vars() {
  std::vector<bool> used(vars.size(), false);
  for (VarId v : outputs) used[v] = true;
  for (const auto& a : atoms) used[a.source] = used[a.target] = true;
  std::vector<VarId> remap(vars.size(), 0);
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<VarId>(kept.size());
    kept.push_back(vars[i]);
  }
  for (VarId& v : outputs) v = remap[v];
  for (auto& a : atoms) {
    a.source = remap[a.source];
    a.target = remap[a.target];
  }
  vars = std::move(kept);
}

std::size_t Ucrpq::max_atoms() const {
  std::size_t m = 0;
  for (const auto& d : disjuncts) m = std::max(m, d.num_atoms());
  return m;
}

std::size_t Ucrpq::max_vars() const {
  std::size_t m = 0;
  for (const auto& d : disjuncts) m = std::max(m, d.num_vars());
  return m;
}

Ucrpq as_union(const Crpq& q) { return Ucrpq{q.alphabet, {q}}; }

// ---------------------------------------------------------------------------
// GraphDb / Multigraph

NodeId GraphDb::add_node(const std::string& n) {
  if (auto v = find_node(n)) return *v;
  nodes.push_back(n);
  return static_cast<NodeId>(nodes.size() - 1);
}

std::optional<NodeId> GraphDb::find_node(std::string_view n) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == n) return static_cast<NodeId>(i);
  return std::nullopt;
}

void GraphDb::add_edge(NodeId s, Symbol a, NodeId t) {
  Edge e{s, a, t};
  if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
}

std::uint32_t Multigraph::add_vertex(const std::string& n) {
  names.push_back(n);
  return static_cast<std::uint32_t>(names.size() - 1);
}

void Multigraph::add_edge(std::uint32_t s, std::uint32_t t) { edges.push_back({s, t, edges.size()}); }

Multigraph underlying_graph(const Crpq& q) {
  Multigraph g;
  g.names = q.vars;
  for (const auto& a : q.atoms) g.add_edge(a.source, a.target);
  return g;
}

// ---------------------------------------------------------------------------
// Query text format

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct RawAtom {
  std::string source, regex, target;
  std::size_t regex_pos;
};
struct RawQuery {
  std::string name;
  std::vector<std::string> outputs;
  std::vector<RawAtom> atoms;
  std::size_t pos;
};
struct RawFile {
  std::optional<std::vector<std::string>> alphabet;
  std::vector<RawQuery> queries;
  std::optional<std::vector<std::pair<std::string, std::size_t>>> union_names;
};

class QueryLexer {
 public:
  explicit QueryLexer(std::string_view text) : text_(text) {}

  RawFile parse_file() {
    RawFile f;
    skip();
    while (!at_end()) {
      std::size_t start = pos_;
      std::string kw = ident();
      if (kw == "alphabet") {
        if (f.alphabet || !f.queries.empty()) throw ParseError("alphabet header must come first", start);
        f.alphabet = alphabet_letters();
      } else if (kw == "query") {
        f.queries.push_back(query_body());
      } else if (kw == "union") {
        if (f.union_names) throw ParseError("duplicate union block", start);
        f.union_names = union_body();
      } else {
        throw ParseError("expected 'alphabet', 'query' or 'union'", start);
      }
      skip();
    }
    return f;
  }

  RawQuery parse_single() {
    skip();
    std::size_t save = pos_;
    if (ident() != "query") pos_ = save;
    RawQuery q = query_body();
    skip();
    if (!at_end()) throw ParseError("trailing input after query", pos_);
    return q;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (text_.substr(pos_, 2) == "//") {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
  }

  void expect(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) != tok) throw ParseError("expected '" + std::string(tok) + "'", pos_);
    pos_ += tok.size();
  }

  bool accept(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  std::string ident() {
    skip();
    if (at_end() || !is_ident_start(text_[pos_])) throw ParseError("expected identifier", pos_);
    std::size_t start = pos_;
    while (!at_end() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> alphabet_letters() {
    std::vector<std::string> letters;
    for (;;) {
      skip();
      std::size_t start = pos_;
      while (!at_end() && text_[pos_] != ',' && text_[pos_] != ';' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == start) throw ParseError("expected letter", pos_);
      std::string l(text_.substr(start, pos_ - start));
      if (l.find_first_of("()|.+*?[]{}") != std::string::npos || (l[0] == '%' && l != kMarkerLetter))
        throw ParseError("invalid letter name '" + l + "'", start);
      if (std::find(letters.begin(), letters.end(), l) != letters.end())
        throw ParseError("duplicate letter '" + l + "'", start);
      letters.push_back(std::move(l));
      skip();
      if (accept(";")) break;
      expect(",");
    }
    return letters;
  }

  RawQuery query_body() {
    RawQuery q;
    skip();
    q.pos = pos_;
    q.name = ident();
    expect("(");
    if (!accept(")")) {
      for (;;) {
        q.outputs.push_back(ident());
        if (accept(")")) break;
        expect(",");
      }
    }
    expect("{");
    for (;;) {
      if (accept("}")) break;
      RawAtom a;
      a.source = ident();
      expect("-[");
      a.regex_pos = pos_;
      auto close = text_.find("]->", pos_);
      if (close == std::string_view::npos) throw ParseError("unterminated atom label", pos_);
      a.regex = std::string(text_.substr(pos_, close - pos_));
      pos_ = close + 3;
      a.target = ident();
      q.atoms.push_back(std::move(a));
      if (accept("}")) break;
      expect(";");
    }
    accept(";");
    return q;
  }

  std::vector<std::pair<std::string, std::size_t>> union_body() {
    std::vector<std::pair<std::string, std::size_t>> names;
    expect("{");
    for (;;) {
      skip();
      std::size_t p = pos_;
      names.emplace_back(ident(), p);
      if (accept("}")) break;
      expect("|");
    }
    accept(";");
    return names;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Letters of an expression written over single-character letters.
void infer_letters(std::string_view re, std::set<std::string>& out) {
  for (std::size_t i = 0; i < re.size(); ++i) {
    char c = re[i];
    if (c == '%') {
      std::size_t j = i + 1;
      while (j < re.size() && std::isalpha(static_cast<unsigned char>(re[j]))) ++j;
      std::string kw(re.substr(i, j - i));
      if (kw == kMarkerLetter) out.insert(kw);
      i = j - 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("()|.+*?").find(c) != std::string_view::npos)
      continue;
    out.insert(std::string(1, c));
  }
}

Crpq build_query(const RawQuery& raw, const AlphabetRef& alphabet) {
  Crpq q;
  q.name = raw.name;
  q.alphabet = alphabet;
  for (const auto& o : raw.outputs) q.outputs.push_back(q.var(o));
  for (const auto& a : raw.atoms) {
    VarId s = q.var(a.source);
    RegexAst ast;
    try {
      ast = parse_regex(a.regex, *alphabet);
    } catch (const ParseError& e) {
      throw ParseError(std::string("in label of query '") + raw.name + "': " + e.what(), a.regex_pos + e.position());
    }
    VarId t = q.var(a.target);
    q.add_atom(s, make_label(std::move(ast), *alphabet), t);
  }
  return q;
}

AlphabetRef resolve_alphabet(const RawFile& f, const std::vector<std::string>& extra) {
  std::vector<std::string> letters;
  if (f.alphabet) {
    letters = *f.alphabet;
  } else {
    std::set<std::string> inferred;
    for (const auto& q : f.queries)
      for (const auto& a : q.atoms) infer_letters(a.regex, inferred);
    letters.assign(inferred.begin(), inferred.end());
  }
  auto alpha = std::make_shared<Alphabet>(letters);
  for (const auto& l : extra) alpha->add(l);
  return alpha;
}

std::string format_query(const Crpq& q, const std::string& name) {
  std::string s = "query " + name + "(";
  for (std::size_t i = 0; i < q.outputs.size(); ++i) {
    if (i) s += ", ";
    s += q.vars[q.outputs[i]];
  }
  s += ") {";
  if (q.atoms.empty()) return s + " }\n";
  s += "\n";
  for (const auto& a : q.atoms)
    s += "  " + q.vars[a.source] + " -[" + a.label->key + "]-> " + q.vars[a.target] + ";\n";
  return s + "}\n";
}

std::string format_alphabet(const Alphabet& alphabet) {
  std::string s = "alphabet ";
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (i) s += ", ";
    s += alphabet.name(static_cast<Symbol>(i));
  }
  return s + ";\n";
}

}  // namespace

Ucrpq parse_query(std::string_view text, const std::vector<std::string>& extra_letters) {
  RawFile f = QueryLexer(text).parse_file();
  if (f.queries.empty()) throw ParseError("no query in input", 0);
  AlphabetRef alphabet = resolve_alphabet(f, extra_letters);
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < f.queries.size(); ++i)
    if (!by_name.emplace(f.queries[i].name, i).second)
      throw ParseError("duplicate query name '" + f.queries[i].name + "'", f.queries[i].pos);

  Ucrpq u;
  u.alphabet = alphabet;
  if (f.union_names) {
    for (const auto& [n, p] : *f.union_names) {
      auto it = by_name.find(n);
      if (it == by_name.end()) throw ParseError("unknown query '" + n + "' in union", p);
      u.disjuncts.push_back(build_query(f.queries[it->second], alphabet));
    }
  } else {
    for (const auto& rq : f.queries) u.disjuncts.push_back(build_query(rq, alphabet));
  }
  for (const auto& d : u.disjuncts)
    if (d.arity() != u.disjuncts.front().arity())
      throw InputError("arity mismatch: '" + d.name + "' has " + std::to_string(d.arity()) + " outputs, '" +
                       u.disjuncts.front().name + "' has " + std::to_string(u.disjuncts.front().arity()));
  return u;
}

Crpq parse_crpq(std::string_view text, const std::vector<std::string>& extra_letters) {
  Ucrpq u = parse_query(text, extra_letters);
  if (u.disjuncts.size() != 1) throw InputError("expected a single query, found " + std::to_string(u.disjuncts.size()));
  return std::move(u.disjuncts.front());
}

Crpq parse_crpq_with(std::string_view text, const AlphabetRef& alphabet) {
  return build_query(QueryLexer(text).parse_single(), alphabet);
}

std::string to_text(const Crpq& q) { return format_alphabet(*q.alphabet) + format_query(q, q.name); }

std::string to_text(const Ucrpq& u) {
  std::string s = format_alphabet(*u.alphabet);
  if (u.disjuncts.size() == 1) return s + format_query(u.disjuncts.front(), u.disjuncts.front().name);
  std::set<std::string> used;
  std::vector<std::string> names;
  for (const auto& d : u.disjuncts) {
    std::string n = d.name.empty() ? "q" : d.name;
    std::string base = n;
    for (int i = 1; used.count(n); ++i) n = base + "_" + std::to_string(i);
    used.insert(n);
    names.push_back(n);
    s += format_query(d, n);
  }
  s += "union { ";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += " | ";
    s += names[i];
  }
  return s + " }\n";
}

AlphabetRef merge_alphabets(const AlphabetRef& a, const AlphabetRef& b) {
  if (*a == *b) return a;
  auto m = std::make_shared<Alphabet>(a->letters());
  for (const auto& l : b->letters()) m->add(l);
  return m;
}

namespace {

Symbol rebase_symbol(Symbol s, const Alphabet& from, const Alphabet& to) {
  auto t = to.find(from.name(s));
  if (!t) throw InputError("letter '" + from.name(s) + "' is missing from the target alphabet");
  return *t;
}

RegexAst rebase_ast(const RegexAst& ast, const Alphabet& from, const Alphabet& to) {
  RegexAst r = ast;
  if (r.kind == RegexAst::Kind::Letter) r.symbol = rebase_symbol(r.symbol, from, to);
  for (auto& c : r.children) c = rebase_ast(c, from, to);
  return r;
}

}  // namespace

Crpq rebase(const Crpq& q, const AlphabetRef& alphabet) {
  if (q.alphabet == alphabet) return q;
  Crpq r = q;
  r.alphabet = alphabet;
  for (auto& a : r.atoms) a.label = make_label(rebase_ast(a.label->ast, *q.alphabet, *alphabet), *alphabet);
  return r;
}

Ucrpq rebase(const Ucrpq& u, const AlphabetRef& alphabet) {
  Ucrpq r{alphabet, {}};
  for (const auto& d : u.disjuncts) r.disjuncts.push_back(rebase(d, alphabet));
  return r;
}

GraphDb rebase(const GraphDb& db, const AlphabetRef& alphabet) {
  GraphDb r = db;
  r.alphabet = alphabet;
  for (auto& e : r.edges) e.label = rebase_symbol(e.label, *db.alphabet, *alphabet);
  return r;
}

// ---------------------------------------------------------------------------
// GraphDb JSON

namespace {

using nlohmann::ordered_json;

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

void check_db_shape(const ordered_json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("edges") || !j["nodes"].is_array() ||
      !j["edges"].is_array())
    throw InputError("database JSON must be an object with 'nodes' and 'edges' arrays");
  for (const auto& n : j["nodes"])
    if (!n.is_string()) throw InputError("node names must be strings");
  for (const auto& e : j["edges"])
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_string())
      throw InputError("edges must be [source, letter, target] string triples");
}

}  // namespace

std::vector<std::string> graphdb_letters(std::string_view json) {
  ordered_json j = parse_json(json);
  check_db_shape(j);
  std::vector<std::string> letters;
  for (const auto& e : j["edges"]) {
    auto l = e[1].get<std::string>();
    if (std::find(letters.begin(), letters.end(), l) == letters.end()) letters.push_back(l);
  }
  return letters;
}

GraphDb load_graphdb(std::string_view json, AlphabetRef alphabet) {
  ordered_json j = parse_json(json);
  check_db_shape(j);
  std::shared_ptr<Alphabet> own;
  if (!alphabet) {
    own = std::make_shared<Alphabet>();
    alphabet = own;
  }
  GraphDb db;
  db.alphabet = alphabet;
  for (const auto& n : j["nodes"]) {
    auto name = n.get<std::string>();
    if (db.find_node(name)) throw InputError("duplicate node '" + name + "'");
    db.add_node(name);
  }
  for (const auto& e : j["edges"]) {
    auto s = db.find_node(e[0].get<std::string>());
    auto t = db.find_node(e[2].get<std::string>());
    if (!s || !t) throw InputError("edge references undeclared node in " + e.dump());
    auto letter = e[1].get<std::string>();
    std::optional<Symbol> a = own ? own->add(letter) : alphabet->find(letter);
    if (!a) throw InputError("edge letter '" + letter + "' is not in the alphabet");
    db.add_edge(*s, *a, *t);
  }
  return db;
}

std::string save_graphdb(const GraphDb& db) {
  ordered_json j;
  j["nodes"] = db.nodes;
  j["edges"] = ordered_json::array();
  for (const auto& e : db.edges)
    j["edges"].push_back({db.nodes[e.source], db.alphabet->name(e.label), db.nodes[e.target]});
  return j.dump();
}

}  // namespace crpq
