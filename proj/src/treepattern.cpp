#include "crpq/treepattern.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "crpq/error.hpp"

namespace crpq {

std::vector<std::size_t> TreePattern::children(std::size_t n) const {
  std::vector<std::size_t> c;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].parent == n) c.push_back(i);
  return c;
}

void validate(const TreePattern& t) {
  if (t.nodes.empty()) throw InputError("a tree pattern needs a root");
  if (t.nodes[0].parent) throw InputError("the root has a parent");
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    if (!t.nodes[i].parent) throw InputError("node " + std::to_string(i) + " has no parent");
    if (*t.nodes[i].parent >= t.nodes.size()) throw InputError("node " + std::to_string(i) + " has an unknown parent");
  }
  // every node reaches the root without revisiting a node
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    std::size_t at = i, steps = 0;
    while (t.nodes[at].parent) {
      at = *t.nodes[at].parent;
      if (++steps > t.nodes.size()) throw InputError("parent links form a cycle");
    }
  }
  for (const auto& n : t.nodes)
    if (n.label && (n.label->empty() || *n.label == "*" || (*n.label)[0] == '%'))
      throw InputError("invalid node label '" + *n.label + "'");
}

TreePattern TreePattern::preorder() const {
  validate(*this);
  TreePattern r;
  std::function<void(std::size_t, std::optional<std::size_t>)> visit = [&](std::size_t n, std::optional<std::size_t> p) {
    std::size_t id = r.nodes.size();
    r.nodes.push_back({nodes[n].label, p, p ? nodes[n].transitive : false});
    for (std::size_t c : children(n)) visit(c, id);
  };
  visit(0, std::nullopt);
  return r;
}

TreePattern parse_tree_pattern(std::string_view text) {
  TreePattern t;
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (indent, node)
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0, offset = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t line_start = offset;
    offset += line.size() + 1;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t indent = line.find_first_not_of(' ');
    if (indent == std::string::npos) continue;
    std::string rest = line.substr(indent);
    bool transitive = false, edge = false;
    if (rest.rfind("->", 0) == 0 || rest.rfind("=>", 0) == 0) {
      edge = true;
      transitive = rest[0] == '=';
      rest = rest.substr(2);
      rest.erase(0, rest.find_first_not_of(' '));
    }
    if (rest.empty() || rest.find(' ') != std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected one node label", line_start + indent);
    TreePattern::Node n;
    if (rest != "*") n.label = rest;
    if (t.nodes.empty()) {
      if (edge) throw ParseError("line " + std::to_string(lineno) + ": the root has no incoming edge", line_start);
    } else {
      if (!edge) throw ParseError("line " + std::to_string(lineno) + ": expected '->' or '=>'", line_start + indent);
      while (!stack.empty() && stack.back().first >= indent) stack.pop_back();
      if (stack.empty()) throw ParseError("line " + std::to_string(lineno) + ": a second root", line_start);
      n.parent = stack.back().second;
      n.transitive = transitive;
    }
    stack.emplace_back(indent, t.nodes.size());
    t.nodes.push_back(n);
  }
  if (t.nodes.empty()) throw ParseError("empty tree pattern", 0);
  validate(t);
  return t;
}

std::string to_text(const TreePattern& t) {
  validate(t);
  std::string s;
  std::function<void(std::size_t, std::size_t)> out = [&](std::size_t n, std::size_t depth) {
    s += std::string(2 * depth, ' ');
    if (depth) s += t.nodes[n].transitive ? "=> " : "-> ";
    s += t.nodes[n].label ? *t.nodes[n].label : "*";
    s += "\n";
    for (std::size_t c : t.children(n)) out(c, depth + 1);
  };
  out(0, 0);
  return s;
}

Crpq encode(const TreePattern& t, const AlphabetRef& base) {
  TreePattern p = t.preorder();
  auto alpha = std::make_shared<Alphabet>(base ? *base : Alphabet{});
  for (const auto& n : p.nodes)
    if (n.label) alpha->add(*n.label);
  Symbol marker = alpha->add(std::string(kMarkerLetter));
  Crpq q;
  q.alphabet = alpha;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) q.var("n" + std::to_string(i));
  LabelRef simple = letter_label(marker, *alpha);
  LabelRef trans = make_label(RegexAst::plus(RegexAst::letter(marker)), *alpha);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const auto& n = p.nodes[i];
    if (n.parent)
      q.add_atom(static_cast<VarId>(*n.parent), n.transitive ? trans : simple, static_cast<VarId>(i));
    if (n.label) q.add_atom(static_cast<VarId>(i), letter_label(*alpha->find(*n.label), *alpha), static_cast<VarId>(i));
  }
  return q;
}

std::optional<TreePattern> decode(const Crpq& q) {
  if (!q.outputs.empty()) return std::nullopt;
  // a lone wildcard encodes to the query without atoms, whose text form declares no variable
  if (q.num_atoms() == 0) {
    if (q.num_vars() > 1) return std::nullopt;
    return TreePattern{{TreePattern::Node{}}};
  }
  auto marker = q.alphabet->find(kMarkerLetter);
  if (!marker) marker = static_cast<Symbol>(q.alphabet->size());  // matches no letter
  const std::size_t n = q.num_vars();
  std::vector<std::optional<std::string>> label(n);
  std::vector<std::optional<VarId>> parent(n);
  std::vector<bool> transitive(n, false);
  std::vector<std::vector<VarId>> kids(n);
  for (const auto& a : q.atoms) {
    const RegexAst& ast = a.label->ast;
    if (a.source == a.target) {
      if (ast.kind != RegexAst::Kind::Letter || ast.symbol == *marker || label[a.source]) return std::nullopt;
      label[a.source] = q.alphabet->name(ast.symbol);
      continue;
    }
    bool simple = ast.kind == RegexAst::Kind::Letter && ast.symbol == *marker;
    bool plus = ast.kind == RegexAst::Kind::Plus && ast.children[0].kind == RegexAst::Kind::Letter &&
                ast.children[0].symbol == *marker;
    if (!simple && !plus) return std::nullopt;
    if (parent[a.target]) return std::nullopt;
    parent[a.target] = a.source;
    transitive[a.target] = plus;
    kids[a.source].push_back(a.target);
  }
  std::vector<VarId> roots;
  for (VarId v = 0; v < n; ++v)
    if (!parent[v]) roots.push_back(v);
  if (roots.size() != 1) return std::nullopt;
  TreePattern t;
  std::vector<bool> seen(n, false);
  bool ok = true;
  std::function<void(VarId, std::optional<std::size_t>)> visit = [&](VarId v, std::optional<std::size_t> p) {
    if (seen[v]) {
      ok = false;
      return;
    }
    seen[v] = true;
    std::size_t id = t.nodes.size();
    t.nodes.push_back({label[v], p, p ? transitive[v] : false});
    for (VarId c : kids[v]) visit(c, id);
  };
  visit(roots[0], std::nullopt);
  if (!ok || std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
  return t;
}

}  // namespace crpq
