#include "crpq/automata.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>
#include <utility>

#include "crpq/error.hpp"

namespace crpq {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> letters) {
  for (auto& l : letters) add(l);
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < letters_.size(); ++i)
    if (letters_[i] == name) return static_cast<Symbol>(i);
  return std::nullopt;
}

Symbol Alphabet::add(const std::string& name) {
  if (auto s = find(name)) return *s;
  letters_.push_back(name);
  return static_cast<Symbol>(letters_.size() - 1);
}

bool Alphabet::compact() const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [](const std::string& l) { return l.size() == 1; });
}

std::string Alphabet::format_word(const Word& w) const {
  if (w.empty()) return "%eps";
  std::string out;
  const bool sep = !compact();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (sep && i > 0) out += '.';
    out += name(w[i]);
  }
  return out;
}

namespace {

// Longest letter of `alphabet` that is a prefix of `text`.
std::optional<std::pair<Symbol, std::size_t>> match_letter(std::string_view text,
                                                           const Alphabet& alphabet) {
  std::optional<std::pair<Symbol, std::size_t>> best;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    const std::string& l = alphabet.name(static_cast<Symbol>(i));
    if (l.empty() || l.size() > text.size()) continue;
    if (text.substr(0, l.size()) != l) continue;
    if (!best || l.size() > best->second) best = {{static_cast<Symbol>(i), l.size()}};
  }
  return best;
}

}  // namespace

Word Alphabet::parse_word(std::string_view text) const {
  Word w;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
      ++pos;
  };
  skip();
  if (text.substr(pos) == "%eps") return w;
  while (pos < text.size()) {
    auto m = match_letter(text.substr(pos), *this);
    if (!m) throw InputError("unknown letter in word '" + std::string(text) + "' at position " + std::to_string(pos));
    w.push_back(m->first);
    pos += m->second;
    skip();
  }
  return w;
}

// ---------------------------------------------------------------------------
// Regex parsing and printing

namespace {

class RegexParser {
 public:
  RegexParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  RegexAst parse() {
    RegexAst e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool starts_atom() {
    char c = peek();
    if (c == '\0') return false;
    if (c == '(' || c == '%') return true;
    if (c == '|' || c == ')' || c == '.' || c == '+' || c == '*' || c == '?') return false;
    return true;  // a letter, or an unknown one reported by parse_atom
  }

  RegexAst parse_expr() {
    std::vector<RegexAst> terms;
    terms.push_back(parse_term());
    while (peek() == '|') {
      ++pos_;
      terms.push_back(parse_term());
    }
    return terms.size() == 1 ? std::move(terms.front()) : RegexAst::alt(std::move(terms));
  }

  RegexAst parse_term() {
    std::vector<RegexAst> parts;
    parts.push_back(parse_factor());
    for (;;) {
      if (peek() == '.') {
        ++pos_;
        parts.push_back(parse_factor());
      } else if (starts_atom()) {
        parts.push_back(parse_factor());
      } else {
        break;
      }
    }
    return parts.size() == 1 ? std::move(parts.front()) : RegexAst::concat(std::move(parts));
  }

  RegexAst parse_factor() {
    RegexAst a = parse_atom();
    for (;;) {
      char c = peek();
      if (c == '+') a = RegexAst::plus(std::move(a));
      else if (c == '*') a = RegexAst::star(std::move(a));
      else if (c == '?') a = RegexAst::opt(std::move(a));
      else break;
      ++pos_;
    }
    return a;
  }

  RegexAst parse_atom() {
    char c = peek();
    if (c == '\0') throw ParseError("unexpected end of expression", pos_);
    if (c == '(') {
      std::size_t open = pos_++;
      RegexAst e = parse_expr();
      if (peek() != ')') throw ParseError("unbalanced '(' opened at " + std::to_string(open), pos_);
      ++pos_;
      return e;
    }
    if (c == '%') {
      std::size_t start = pos_++;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view kw = text_.substr(start, pos_ - start);
      if (kw == "%eps") return RegexAst::epsilon();
      if (kw == "%any") return RegexAst::any();
      if (kw == "%empty") return RegexAst::empty();
      if (auto s = alphabet_.find(kw)) return RegexAst::letter(*s);
      throw InputError("unknown letter '" + std::string(kw) + "' at position " + std::to_string(start));
    }
    if (c == '|' || c == ')' || c == '.' || c == '+' || c == '*' || c == '?')
      throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    auto m = match_letter(text_.substr(pos_), alphabet_);
    if (!m) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
      if (end == pos_) end = pos_ + 1;
      throw InputError("unknown letter '" + std::string(text_.substr(pos_, end - pos_)) +
                       "' at position " + std::to_string(pos_));
    }
    pos_ += m->second;
    return RegexAst::letter(m->first);
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

bool ends_with_keyword(const std::string& s) {
  auto pct = s.rfind('%');
  if (pct == std::string::npos) return false;
  return pct + 1 < s.size() &&
         std::all_of(s.begin() + static_cast<std::ptrdiff_t>(pct) + 1, s.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

// ctx: 0 = top/union operand, 1 = concat operand, 2 = postfix operand
std::string print(const RegexAst& n, const Alphabet& alphabet, int ctx) {
  using K = RegexAst::Kind;
  switch (n.kind) {
    case K::Letter: return alphabet.name(n.symbol);
    case K::Epsilon: return "%eps";
    case K::Empty: return "%empty";
    case K::AnyLetter: return "%any";
    case K::Union: {
      std::string s;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += '|';
        s += print(n.children[i], alphabet, 1);
      }
      return ctx > 0 ? "(" + s + ")" : s;
    }
    case K::Concat: {
      std::string s;
      const bool compact = alphabet.compact();
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        std::string part = print(n.children[i], alphabet, 2);
        if (i && (!compact || ends_with_keyword(s))) s += '.';
        s += part;
      }
      return ctx > 1 ? "(" + s + ")" : s;
    }
    case K::Star: return print(n.children[0], alphabet, 2) + "*";
    case K::Plus: return print(n.children[0], alphabet, 2) + "+";
    case K::Opt: return print(n.children[0], alphabet, 2) + "?";
  }
  return {};
}

}  // namespace

RegexAst parse_regex(std::string_view text, const Alphabet& alphabet) {
  return RegexParser(text, alphabet).parse();
}

std::string to_string(const RegexAst& ast, const Alphabet& alphabet) {
  return print(ast, alphabet, 0);
}

std::size_t ast_size(const RegexAst& ast) {
  std::size_t n = 1;
  for (const auto& c : ast.children) n += ast_size(c);
  return n;
}

std::size_t ast_positions(const RegexAst& ast) {
  if (ast.kind == RegexAst::Kind::Letter || ast.kind == RegexAst::Kind::AnyLetter) return 1;
  std::size_t n = 0;
  for (const auto& c : ast.children) n += ast_positions(c);
  return n;
}

bool ast_nullable(const RegexAst& ast) {
  using K = RegexAst::Kind;
  switch (ast.kind) {
    case K::Letter:
    case K::AnyLetter:
    case K::Empty: return false;
    case K::Epsilon:
    case K::Star:
    case K::Opt: return true;
    case K::Plus: return ast_nullable(ast.children[0]);
    case K::Concat:
      return std::all_of(ast.children.begin(), ast.children.end(), ast_nullable);
    case K::Union:
      return std::any_of(ast.children.begin(), ast.children.end(), ast_nullable);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Simplifying constructors

namespace {

using K = RegexAst::Kind;

// The sequence a star/plus body stands for when matched against flattened concat items.
std::vector<RegexAst> body_items(const RegexAst& body) {
  if (body.kind == K::Concat) return body.children;
  return {body};
}

bool tail_equals(const std::vector<RegexAst>& out, const std::vector<RegexAst>& items) {
  if (items.size() > out.size()) return false;
  return std::equal(items.begin(), items.end(), out.end() - static_cast<std::ptrdiff_t>(items.size()));
}

}  // namespace

RegexAst make_concat(std::vector<RegexAst> parts) {
  std::vector<RegexAst> flat;
  for (auto& p : parts) {
    if (p.kind == K::Empty) return RegexAst::empty();
    if (p.kind == K::Epsilon) continue;
    if (p.kind == K::Concat) {
      for (auto& c : p.children) flat.push_back(std::move(c));
    } else {
      flat.push_back(std::move(p));
    }
  }
  std::vector<RegexAst> out;
  for (auto& x : flat) {
    if (!out.empty()) {
      RegexAst& y = out.back();
      if ((y.kind == K::Star || y.kind == K::Plus) && (x.kind == K::Star || x.kind == K::Plus) &&
          y.children[0] == x.children[0]) {
        // b*b* = b*, b⁺b* = b*b⁺ = b⁺, b⁺b⁺ stays
        if (y.kind == K::Star && x.kind == K::Star) continue;
        if (y.kind == K::Plus && x.kind == K::Star) continue;
        if (y.kind == K::Star && x.kind == K::Plus) {
          y = std::move(x);
          continue;
        }
      }
      if (x.kind == K::Star) {
        auto items = body_items(x.children[0]);
        if (tail_equals(out, items)) {
          RegexAst body = x.children[0];
          out.resize(out.size() - items.size());
          out.push_back(RegexAst::plus(std::move(body)));
          continue;
        }
      }
    }
    out.push_back(std::move(x));
    // b*·b → b⁺ once the body has been fully appended after the star
    for (std::size_t back = 1; back < out.size(); ++back) {
      const RegexAst& s = out[out.size() - 1 - back];
      if (s.kind != K::Star) continue;
      auto items = body_items(s.children[0]);
      if (items.size() != back) continue;
      if (!std::equal(items.begin(), items.end(), out.end() - static_cast<std::ptrdiff_t>(back))) continue;
      RegexAst body = s.children[0];
      out.resize(out.size() - back - 1);
      out.push_back(RegexAst::plus(std::move(body)));
      break;
    }
  }
  if (out.empty()) return RegexAst::epsilon();
  if (out.size() == 1) return std::move(out.front());
  return RegexAst::concat(std::move(out));
}

RegexAst make_union(std::vector<RegexAst> parts) {
  std::vector<RegexAst> flat;
  for (auto& p : parts) {
    if (p.kind == K::Empty) continue;
    if (p.kind == K::Union) {
      for (auto& c : p.children) flat.push_back(std::move(c));
    } else {
      flat.push_back(std::move(p));
    }
  }
  std::vector<RegexAst> out;
  for (auto& x : flat)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(std::move(x));
  // p | p·z⁺ → p·z*  and  p | z⁺·p → z*·p
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind != K::Concat) continue;
    const auto& items = out[i].children;
    std::vector<RegexAst> head(items.begin(), items.end() - 1), tail(items.begin() + 1, items.end());
    RegexAst head_ast = head.size() == 1 ? head[0] : RegexAst::concat(head);
    RegexAst tail_ast = tail.size() == 1 ? tail[0] : RegexAst::concat(tail);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j == i) continue;
      if (items.back().kind == K::Plus && out[j] == head_ast) {
        head.push_back(make_star(items.back().children[0]));
        out[i] = make_concat(std::move(head));
      } else if (items.front().kind == K::Plus && out[j] == tail_ast) {
        tail.insert(tail.begin(), make_star(items.front().children[0]));
        out[i] = make_concat(std::move(tail));
      } else {
        continue;
      }
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
      i = static_cast<std::size_t>(-1);
      break;
    }
  }
  auto eps = std::find(out.begin(), out.end(), RegexAst::epsilon());
  if (eps != out.end() && out.size() > 1) {
    out.erase(eps);
    bool absorbed = false;
    for (auto& x : out) {
      if (ast_nullable(x)) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) {
      auto plus = std::find_if(out.begin(), out.end(), [](const RegexAst& x) { return x.kind == K::Plus; });
      if (plus != out.end()) {
        *plus = make_star(plus->children[0]);
      } else if (out.size() == 1) {
        return RegexAst::opt(std::move(out.front()));
      } else {
        out.insert(out.begin(), RegexAst::epsilon());
      }
    }
  }
  if (out.empty()) return RegexAst::empty();
  if (out.size() == 1) return std::move(out.front());
  return RegexAst::alt(std::move(out));
}

RegexAst make_star(RegexAst body) {
  switch (body.kind) {
    case K::Empty:
    case K::Epsilon: return RegexAst::epsilon();
    case K::Star: return body;
    case K::Plus:
    case K::Opt: return make_star(std::move(body.children[0]));
    default: return RegexAst::star(std::move(body));
  }
}

RegexAst make_plus(RegexAst body) {
  switch (body.kind) {
    case K::Empty: return RegexAst::empty();
    case K::Epsilon: return RegexAst::epsilon();
    case K::Star:
    case K::Plus: return body;
    case K::Opt: return make_star(std::move(body.children[0]));
    default: return RegexAst::plus(std::move(body));
  }
}

RegexAst simplify(const RegexAst& ast) {
  switch (ast.kind) {
    case K::Concat: {
      std::vector<RegexAst> c;
      for (const auto& x : ast.children) c.push_back(simplify(x));
      return make_concat(std::move(c));
    }
    case K::Union: {
      std::vector<RegexAst> c;
      for (const auto& x : ast.children) c.push_back(simplify(x));
      return make_union(std::move(c));
    }
    case K::Star: return make_star(simplify(ast.children[0]));
    case K::Plus: return make_plus(simplify(ast.children[0]));
    case K::Opt: {
      RegexAst b = simplify(ast.children[0]);
      if (ast_nullable(b)) return b;
      if (b.kind == K::Empty) return RegexAst::epsilon();
      if (b.kind == K::Plus) return make_star(std::move(b.children[0]));
      return RegexAst::opt(std::move(b));
    }
    default: return ast;
  }
}

// ---------------------------------------------------------------------------
// Nfa

Nfa::Nfa(std::size_t states, std::size_t alphabet_size)
    : alphabet_size_(alphabet_size),
      delta_(states * alphabet_size),
      initial_(states, false),
      final_(states, false) {}

State Nfa::add_state() {
  initial_.push_back(false);
  final_.push_back(false);
  delta_.resize(initial_.size() * alphabet_size_);
  return static_cast<State>(initial_.size() - 1);
}

void Nfa::add_transition(State from, Symbol a, State to) {
  if (from >= num_states() || to >= num_states() || a >= alphabet_size_)
    throw InputError("transition references an undeclared state or symbol");
  auto& succ = delta_[static_cast<std::size_t>(from) * alphabet_size_ + a];
  auto it = std::lower_bound(succ.begin(), succ.end(), to);
  if (it == succ.end() || *it != to) succ.insert(it, to);
}

std::vector<State> Nfa::initial_states() const {
  std::vector<State> r;
  for (State s = 0; s < num_states(); ++s)
    if (initial_[s]) r.push_back(s);
  return r;
}

std::vector<State> Nfa::final_states() const {
  std::vector<State> r;
  for (State s = 0; s < num_states(); ++s)
    if (final_[s]) r.push_back(s);
  return r;
}

std::size_t Nfa::num_transitions() const {
  std::size_t n = 0;
  for (const auto& d : delta_) n += d.size();
  return n;
}

// ---------------------------------------------------------------------------
// Position automaton

namespace {

void insert_sorted(std::vector<State>& v, State s) {
  auto it = std::lower_bound(v.begin(), v.end(), s);
  if (it == v.end() || *it != s) v.insert(it, s);
}

void merge_into(std::vector<State>& dst, const std::vector<State>& src) {
  for (State s : src) insert_sorted(dst, s);
}

struct GlushkovInfo {
  bool nullable = false;
  std::vector<State> first, last;
};

struct GlushkovBuilder {
  std::size_t alphabet_size;
  std::vector<std::vector<State>> follow{{}};
  std::vector<std::vector<Symbol>> letters{{}};

  State new_position(std::vector<Symbol> ls) {
    follow.emplace_back();
    letters.push_back(std::move(ls));
    return static_cast<State>(follow.size() - 1);
  }

  GlushkovInfo visit(const RegexAst& n) {
    switch (n.kind) {
      case K::Letter: {
        State p = new_position({n.symbol});
        return {false, {p}, {p}};
      }
      case K::AnyLetter: {
        std::vector<Symbol> all(alphabet_size);
        std::iota(all.begin(), all.end(), Symbol{0});
        State p = new_position(std::move(all));
        return {false, {p}, {p}};
      }
      case K::Epsilon: return {true, {}, {}};
      case K::Empty: return {false, {}, {}};
      case K::Concat: {
        GlushkovInfo acc{true, {}, {}};
        for (const auto& c : n.children) {
          GlushkovInfo ci = visit(c);
          for (State p : acc.last) merge_into(follow[p], ci.first);
          GlushkovInfo next;
          next.nullable = acc.nullable && ci.nullable;
          next.first = acc.first;
          if (acc.nullable) merge_into(next.first, ci.first);
          next.last = ci.last;
          if (ci.nullable) merge_into(next.last, acc.last);
          acc = std::move(next);
        }
        return acc;
      }
      case K::Union: {
        GlushkovInfo acc{false, {}, {}};
        for (const auto& c : n.children) {
          GlushkovInfo ci = visit(c);
          acc.nullable = acc.nullable || ci.nullable;
          merge_into(acc.first, ci.first);
          merge_into(acc.last, ci.last);
        }
        return acc;
      }
      case K::Star:
      case K::Plus:
      case K::Opt: {
        GlushkovInfo ci = visit(n.children[0]);
        if (n.kind != K::Opt)
          for (State p : ci.last) merge_into(follow[p], ci.first);
        if (n.kind != K::Plus) ci.nullable = true;
        return ci;
      }
    }
    return {};
  }
};

}  // namespace

Nfa compile_nfa(const RegexAst& ast, std::size_t alphabet_size) {
  GlushkovBuilder b{alphabet_size};
  GlushkovInfo root = b.visit(ast);
  const std::size_t n = b.follow.size();
  Nfa nfa(n, alphabet_size);
  nfa.set_initial(0);
  if (root.nullable) nfa.set_final(0);
  for (State p : root.last) nfa.set_final(p);
  for (State p : root.first)
    for (Symbol a : b.letters[p]) nfa.add_transition(0, a, p);
  for (State p = 1; p < n; ++p)
    for (State q : b.follow[p])
      for (Symbol a : b.letters[q]) nfa.add_transition(p, a, q);
  return nfa;
}

Nfa sublanguage(const Nfa& nfa, State p, State q) {
  if (p >= nfa.num_states() || q >= nfa.num_states())
    throw InputError("sublanguage: unknown state");
  Nfa r = nfa;
  for (State s = 0; s < r.num_states(); ++s) {
    r.set_initial(s, s == p);
    r.set_final(s, s == q);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sublanguage expressions for position automata

namespace {

struct SubExpr {
  // first(e, base, q): words from the start of e ending exactly at position q
  static RegexAst first(const RegexAst& e, State base, State q) {
    switch (e.kind) {
      case K::Letter:
      case K::AnyLetter: return e;
      case K::Concat: {
        std::vector<RegexAst> prefix;
        State b = base;
        for (const auto& c : e.children) {
          auto n = static_cast<State>(ast_positions(c));
          if (q < b + n) {
            prefix.push_back(first(c, b, q));
            return make_concat(std::move(prefix));
          }
          prefix.push_back(simplify(c));
          b += n;
        }
        break;
      }
      case K::Union: {
        State b = base;
        for (const auto& c : e.children) {
          auto n = static_cast<State>(ast_positions(c));
          if (q < b + n) return first(c, b, q);
          b += n;
        }
        break;
      }
      case K::Star:
      case K::Plus:
        return make_concat({make_star(simplify(e.children[0])), first(e.children[0], base, q)});
      case K::Opt: return first(e.children[0], base, q);
      default: break;
    }
    return RegexAst::empty();
  }

  // last(e, base, p): words read after position p until leaving e
  static RegexAst last(const RegexAst& e, State base, State p) {
    switch (e.kind) {
      case K::Letter:
      case K::AnyLetter: return RegexAst::epsilon();
      case K::Concat: {
        State b = base;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          auto n = static_cast<State>(ast_positions(e.children[i]));
          if (p < b + n) {
            std::vector<RegexAst> parts{last(e.children[i], b, p)};
            for (std::size_t j = i + 1; j < e.children.size(); ++j) parts.push_back(simplify(e.children[j]));
            return make_concat(std::move(parts));
          }
          b += n;
        }
        break;
      }
      case K::Union: {
        State b = base;
        for (const auto& c : e.children) {
          auto n = static_cast<State>(ast_positions(c));
          if (p < b + n) return last(c, b, p);
          b += n;
        }
        break;
      }
      case K::Star:
      case K::Plus:
        return make_concat({last(e.children[0], base, p), make_star(simplify(e.children[0]))});
      case K::Opt: return last(e.children[0], base, p);
      default: break;
    }
    return RegexAst::empty();
  }

  // middle(e, base, p, q): nonempty words read after p ending at q without leaving e
  static RegexAst middle(const RegexAst& e, State base, State p, State q) {
    switch (e.kind) {
      case K::Letter:
      case K::AnyLetter: return RegexAst::empty();
      case K::Concat:
      case K::Union: {
        std::vector<State> bases;
        State b = base;
        std::size_t ip = 0, iq = 0;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          bases.push_back(b);
          auto n = static_cast<State>(ast_positions(e.children[i]));
          if (p >= b && p < b + n) ip = i;
          if (q >= b && q < b + n) iq = i;
          b += n;
        }
        if (ip == iq) return middle(e.children[ip], bases[ip], p, q);
        if (e.kind == K::Union || ip > iq) return RegexAst::empty();
        std::vector<RegexAst> parts{last(e.children[ip], bases[ip], p)};
        for (std::size_t j = ip + 1; j < iq; ++j) parts.push_back(simplify(e.children[j]));
        parts.push_back(first(e.children[iq], bases[iq], q));
        return make_concat(std::move(parts));
      }
      case K::Star:
      case K::Plus: {
        const RegexAst& c = e.children[0];
        return make_union({middle(c, base, p, q),
                           make_concat({last(c, base, p), make_star(simplify(c)), first(c, base, q)})});
      }
      case K::Opt: return middle(e.children[0], base, p, q);
      default: break;
    }
    return RegexAst::empty();
  }
};

}  // namespace

RegexAst sublanguage_ast(const RegexAst& ast, State p, State q) {
  const auto n = static_cast<State>(ast_positions(ast));
  if (p > n || q > n) throw InputError("sublanguage: unknown state");
  if (p == 0) return q == 0 ? RegexAst::epsilon() : SubExpr::first(ast, 1, q);
  if (q == 0) return RegexAst::empty();
  return make_union({SubExpr::middle(ast, 1, p, q), p == q ? RegexAst::epsilon() : RegexAst::empty()});
}

// ---------------------------------------------------------------------------
// Language operations

namespace {

std::vector<State> post(const Nfa& nfa, const std::vector<State>& set, Symbol a) {
  std::vector<State> out;
  for (State s : set)
    for (State t : nfa.successors(s, a)) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool any_final(const Nfa& nfa, const std::vector<State>& set) {
  return std::any_of(set.begin(), set.end(), [&](State s) { return nfa.is_final(s); });
}

// States from which some final state is reachable.
std::vector<bool> coreachable(const Nfa& nfa) {
  const std::size_t n = nfa.num_states();
  std::vector<std::vector<State>> pred(n);
  for (State s = 0; s < n; ++s)
    for (Symbol a = 0; a < nfa.alphabet_size(); ++a)
      for (State t : nfa.successors(s, a)) pred[t].push_back(s);
  std::vector<bool> ok(n, false);
  std::deque<State> queue;
  for (State s = 0; s < n; ++s)
    if (nfa.is_final(s)) {
      ok[s] = true;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    State t = queue.front();
    queue.pop_front();
    for (State s : pred[t])
      if (!ok[s]) {
        ok[s] = true;
        queue.push_back(s);
      }
  }
  return ok;
}

void require_same_alphabet(const Nfa& a, const Nfa& b) {
  if (a.alphabet_size() != b.alphabet_size()) throw InputError("automata over different alphabets");
}

}  // namespace

bool accepts(const Nfa& nfa, const Word& word) {
  std::vector<State> cur = nfa.initial_states();
  for (Symbol a : word) {
    if (a >= nfa.alphabet_size()) return false;
    cur = post(nfa, cur, a);
    if (cur.empty()) return false;
  }
  return any_final(nfa, cur);
}

bool is_empty(const Nfa& nfa) {
  auto ok = coreachable(nfa);
  for (State s = 0; s < nfa.num_states(); ++s) {
    if (!nfa.is_initial(s)) continue;
    // reachable-from-initial ∩ coreachable is nonempty iff an initial state is coreachable
    if (ok[s]) return false;
  }
  return true;
}

bool has_epsilon(const Nfa& nfa) {
  for (State s = 0; s < nfa.num_states(); ++s)
    if (nfa.is_initial(s) && nfa.is_final(s)) return true;
  return false;
}

Nfa nfa_union(const Nfa& a, const Nfa& b) {
  require_same_alphabet(a, b);
  const auto na = static_cast<State>(a.num_states());
  Nfa r(a.num_states() + b.num_states(), a.alphabet_size());
  for (State s = 0; s < a.num_states(); ++s) {
    r.set_initial(s, a.is_initial(s));
    r.set_final(s, a.is_final(s));
    for (Symbol x = 0; x < a.alphabet_size(); ++x)
      for (State t : a.successors(s, x)) r.add_transition(s, x, t);
  }
  for (State s = 0; s < b.num_states(); ++s) {
    r.set_initial(na + s, b.is_initial(s));
    r.set_final(na + s, b.is_final(s));
    for (Symbol x = 0; x < b.alphabet_size(); ++x)
      for (State t : b.successors(s, x)) r.add_transition(na + s, x, na + t);
  }
  return r;
}

Nfa nfa_concat(const Nfa& a, const Nfa& b) {
  require_same_alphabet(a, b);
  const auto na = static_cast<State>(a.num_states());
  const bool eps_a = has_epsilon(a);
  const bool eps_b = has_epsilon(b);
  Nfa r(a.num_states() + b.num_states(), a.alphabet_size());
  for (State s = 0; s < a.num_states(); ++s) {
    r.set_initial(s, a.is_initial(s));
    r.set_final(s, eps_b && a.is_final(s));
    for (Symbol x = 0; x < a.alphabet_size(); ++x)
      for (State t : a.successors(s, x)) r.add_transition(s, x, t);
  }
  for (State s = 0; s < b.num_states(); ++s) {
    r.set_initial(na + s, eps_a && b.is_initial(s));
    r.set_final(na + s, b.is_final(s));
    for (Symbol x = 0; x < b.alphabet_size(); ++x)
      for (State t : b.successors(s, x)) r.add_transition(na + s, x, na + t);
  }
  for (State f = 0; f < a.num_states(); ++f) {
    if (!a.is_final(f)) continue;
    for (State i = 0; i < b.num_states(); ++i) {
      if (!b.is_initial(i)) continue;
      for (Symbol x = 0; x < b.alphabet_size(); ++x)
        for (State t : b.successors(i, x)) r.add_transition(f, x, na + t);
    }
  }
  return r;
}

Nfa nfa_intersect(const Nfa& a, const Nfa& b) {
  require_same_alphabet(a, b);
  std::map<std::pair<State, State>, State> index;
  std::vector<std::pair<State, State>> pairs;
  Nfa r(0, a.alphabet_size());
  auto intern = [&](State p, State q) {
    auto [it, fresh] = index.emplace(std::make_pair(p, q), static_cast<State>(pairs.size()));
    if (fresh) {
      pairs.emplace_back(p, q);
      r.add_state();
      r.set_final(it->second, a.is_final(p) && b.is_final(q));
    }
    return it->second;
  };
  for (State p : a.initial_states())
    for (State q : b.initial_states()) r.set_initial(intern(p, q));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    for (Symbol x = 0; x < a.alphabet_size(); ++x)
      for (State p2 : a.successors(p, x))
        for (State q2 : b.successors(q, x)) {
          State t = intern(p2, q2);
          r.add_transition(static_cast<State>(i), x, t);
        }
  }
  return r;
}

Nfa nfa_complement(const Nfa& a, std::size_t cap) {
  std::map<std::vector<State>, State> index;
  std::vector<std::vector<State>> subsets;
  Nfa r(0, a.alphabet_size());
  auto intern = [&](std::vector<State> set) {
    auto it = index.find(set);
    if (it != index.end()) return it->second;
    if (subsets.size() >= cap)
      throw ResourceError("complement exceeds the subset cap of " + std::to_string(cap));
    State id = r.add_state();
    r.set_final(id, !any_final(a, set));
    index.emplace(set, id);
    subsets.push_back(std::move(set));
    return id;
  };
  r.set_initial(intern(a.initial_states()));
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (Symbol x = 0; x < a.alphabet_size(); ++x) {
      State t = intern(post(a, subsets[i], x));
      r.add_transition(static_cast<State>(i), x, t);
    }
  return r;
}

Nfa epsilon_nfa(std::size_t alphabet_size) {
  Nfa r(1, alphabet_size);
  r.set_initial(0);
  r.set_final(0);
  return r;
}

Nfa letter_nfa(Symbol a, std::size_t alphabet_size) {
  Nfa r(2, alphabet_size);
  r.set_initial(0);
  r.set_final(1);
  r.add_transition(0, a, 1);
  return r;
}

Nfa any_star_nfa(std::size_t alphabet_size) {
  Nfa r = epsilon_nfa(alphabet_size);
  for (Symbol x = 0; x < alphabet_size; ++x) r.add_transition(0, x, 0);
  return r;
}

InclusionResult check_inclusion(const Nfa& left, const Nfa& right, std::size_t cap) {
  require_same_alphabet(left, right);
  std::map<std::vector<State>, std::size_t> subset_ids;
  std::vector<std::vector<State>> subsets;
  auto subset_id = [&](std::vector<State> set) {
    auto it = subset_ids.find(set);
    if (it != subset_ids.end()) return it->second;
    if (subsets.size() >= cap)
      throw ResourceError("inclusion check exceeds the subset cap of " + std::to_string(cap));
    std::size_t id = subsets.size();
    subset_ids.emplace(set, id);
    subsets.push_back(std::move(set));
    return id;
  };

  struct Node {
    State left;
    std::size_t subset;
    std::size_t parent;
    Symbol via;
  };
  const auto live = coreachable(left);
  std::vector<Node> nodes;
  std::map<std::pair<State, std::size_t>, std::size_t> seen;
  std::size_t init = subset_id(right.initial_states());
  for (State s : left.initial_states()) {
    if (!live[s]) continue;
    if (seen.emplace(std::make_pair(s, init), nodes.size()).second)
      nodes.push_back({s, init, SIZE_MAX, 0});
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node cur = nodes[i];
    if (left.is_final(cur.left) && !any_final(right, subsets[cur.subset])) {
      Word w;
      for (std::size_t j = i; nodes[j].parent != SIZE_MAX; j = nodes[j].parent) w.push_back(nodes[j].via);
      std::reverse(w.begin(), w.end());
      return {false, std::move(w)};
    }
    for (Symbol x = 0; x < left.alphabet_size(); ++x) {
      const auto& succ = left.successors(cur.left, x);
      if (succ.empty()) continue;
      std::size_t next_subset = subset_id(post(right, subsets[cur.subset], x));
      for (State t : succ) {
        if (!live[t]) continue;
        if (seen.emplace(std::make_pair(t, next_subset), nodes.size()).second)
          nodes.push_back({t, next_subset, i, x});
      }
    }
  }
  return {true, std::nullopt};
}

bool language_inclusion(const Nfa& left, const Nfa& right, std::size_t cap) {
  return check_inclusion(left, right, cap).included;
}

bool language_equivalent(const Nfa& a, const Nfa& b, std::size_t cap) {
  return language_inclusion(a, b, cap) && language_inclusion(b, a, cap);
}

std::vector<Word> words_up_to(const Nfa& nfa, std::size_t max_length) {
  const auto live = coreachable(nfa);
  auto prune = [&](std::vector<State> set) {
    set.erase(std::remove_if(set.begin(), set.end(), [&](State s) { return !live[s]; }), set.end());
    return set;
  };
  std::vector<Word> out;
  std::vector<std::pair<Word, std::vector<State>>> level;
  auto init = prune(nfa.initial_states());
  if (!init.empty()) level.emplace_back(Word{}, std::move(init));
  for (std::size_t len = 0; len <= max_length && !level.empty(); ++len) {
    for (const auto& [w, set] : level)
      if (any_final(nfa, set)) out.push_back(w);
    if (len == max_length) break;
    std::vector<std::pair<Word, std::vector<State>>> next;
    for (const auto& [w, set] : level)
      for (Symbol x = 0; x < nfa.alphabet_size(); ++x) {
        auto s2 = prune(post(nfa, set, x));
        if (s2.empty()) continue;
        Word w2 = w;
        w2.push_back(x);
        next.emplace_back(std::move(w2), std::move(s2));
      }
    level = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SRE classification

namespace {

std::optional<SreFactor> classify_factor(const RegexAst& f, std::size_t alphabet_size, bool allow_any_star) {
  switch (f.kind) {
    case K::Letter: return SreFactor{SreFactor::Kind::LetterSet, {f.symbol}};
    case K::AnyLetter: {
      std::vector<Symbol> all(alphabet_size);
      std::iota(all.begin(), all.end(), Symbol{0});
      if (all.empty()) return std::nullopt;
      return SreFactor{SreFactor::Kind::LetterSet, std::move(all)};
    }
    case K::Union: {
      std::vector<Symbol> ls;
      for (const auto& c : f.children) {
        if (c.kind != K::Letter) return std::nullopt;
        ls.push_back(c.symbol);
      }
      std::sort(ls.begin(), ls.end());
      ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
      return SreFactor{SreFactor::Kind::LetterSet, std::move(ls)};
    }
    case K::Plus:
      if (f.children[0].kind == K::Letter) return SreFactor{SreFactor::Kind::Plus, {f.children[0].symbol}};
      return std::nullopt;
    case K::Star:
      if (allow_any_star && f.children[0].kind == K::AnyLetter) return SreFactor{SreFactor::Kind::AnyStar, {}};
      return std::nullopt;
    default: return std::nullopt;
  }
}

void flatten_concat(const RegexAst& n, std::vector<const RegexAst*>& out) {
  if (n.kind == K::Concat) {
    for (const auto& c : n.children) flatten_concat(c, out);
  } else {
    out.push_back(&n);
  }
}

}  // namespace

std::optional<SreFactors> classify_sre(const RegexAst& ast, std::size_t alphabet_size, bool allow_any_star) {
  std::vector<const RegexAst*> parts;
  flatten_concat(ast, parts);
  if (parts.empty()) return std::nullopt;
  SreFactors out;
  for (const RegexAst* p : parts) {
    auto f = classify_factor(*p, alphabet_size, allow_any_star);
    if (!f) return std::nullopt;
    out.push_back(std::move(*f));
  }
  return out;
}

}  // namespace crpq
