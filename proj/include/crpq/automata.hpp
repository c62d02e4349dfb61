#pragma once

// Regular expressions over a finite symbolic alphabet, position-based NFAs and
// the language operations the query algorithms are built from.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crpq {

using Symbol = std::uint32_t;
using State = std::uint32_t;
using Word = std::vector<Symbol>;

/// Letter name of the reserved marker symbol used by tree-pattern encodings.
inline constexpr std::string_view kMarkerLetter = "%marker";

/// Finite ordered set of named letters. Symbols are dense indices.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> letters);

  std::size_t size() const { return letters_.size(); }
  const std::string& name(Symbol s) const { return letters_.at(s); }
  const std::vector<std::string>& letters() const { return letters_; }
  std::optional<Symbol> find(std::string_view name) const;
  /// Adds `name` if absent; returns its symbol either way.
  Symbol add(const std::string& name);

  /// True when every letter is a single character, so concatenation needs no separator.
  bool compact() const;

  /// Renders a word; the empty word is `%eps`.
  std::string format_word(const Word& w) const;
  /// Parses a word written as juxtaposed letters (optionally '.'-separated) or `%eps`.
  Word parse_word(std::string_view text) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> letters_;
};

using AlphabetRef = std::shared_ptr<const Alphabet>;

struct RegexAst {
  enum class Kind { Letter, Epsilon, Empty, Concat, Union, Star, Plus, Opt, AnyLetter };

  Kind kind = Kind::Empty;
  Symbol symbol = 0;
  std::vector<RegexAst> children;

  static RegexAst letter(Symbol s) { return {Kind::Letter, s, {}}; }
  static RegexAst epsilon() { return {Kind::Epsilon, 0, {}}; }
  static RegexAst empty() { return {Kind::Empty, 0, {}}; }
  static RegexAst any() { return {Kind::AnyLetter, 0, {}}; }
  static RegexAst concat(std::vector<RegexAst> c) { return {Kind::Concat, 0, std::move(c)}; }
  static RegexAst alt(std::vector<RegexAst> c) { return {Kind::Union, 0, std::move(c)}; }
  static RegexAst star(RegexAst c) { return {Kind::Star, 0, {std::move(c)}}; }
  static RegexAst plus(RegexAst c) { return {Kind::Plus, 0, {std::move(c)}}; }
  static RegexAst opt(RegexAst c) { return {Kind::Opt, 0, {std::move(c)}}; }

  bool operator==(const RegexAst&) const = default;
};

/// Parses `text` with the grammar
///   expr := term ('|' term)* ; term := factor ('.'? factor)* ;
///   factor := atom ('+'|'*'|'?')* ; atom := LETTER | %eps | %any | %empty | '(' expr ')'
/// Letters are matched longest-first against `alphabet`.
RegexAst parse_regex(std::string_view text, const Alphabet& alphabet);
std::string to_string(const RegexAst& ast, const Alphabet& alphabet);

/// Number of nodes.
std::size_t ast_size(const RegexAst& ast);
/// Number of letter positions (Letter and AnyLetter leaves).
std::size_t ast_positions(const RegexAst& ast);
bool ast_nullable(const RegexAst& ast);

// Simplifying constructors. Each returns an AST denoting the same language as
// the unsimplified form, with ε/∅ units folded and x*·x → x⁺ style merges.
RegexAst make_concat(std::vector<RegexAst> parts);
RegexAst make_union(std::vector<RegexAst> parts);
RegexAst make_star(RegexAst body);
RegexAst make_plus(RegexAst body);
RegexAst simplify(const RegexAst& ast);

class Nfa {
 public:
  Nfa() = default;
  Nfa(std::size_t states, std::size_t alphabet_size);

  std::size_t num_states() const { return initial_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }

  State add_state();
  void add_transition(State from, Symbol a, State to);
  void set_initial(State s, bool value = true) { initial_.at(s) = value; }
  void set_final(State s, bool value = true) { final_.at(s) = value; }

  bool is_initial(State s) const { return initial_[s]; }
  bool is_final(State s) const { return final_[s]; }
  std::vector<State> initial_states() const;
  std::vector<State> final_states() const;
  const std::vector<State>& successors(State s, Symbol a) const {
    return delta_[static_cast<std::size_t>(s) * alphabet_size_ + a];
  }
  std::size_t num_transitions() const;

  bool operator==(const Nfa&) const = default;

 private:
  std::size_t alphabet_size_ = 0;
  std::vector<std::vector<State>> delta_;
  std::vector<bool> initial_;
  std::vector<bool> final_;
};

/// Position (Glushkov) automaton: state 0 is the start state and state i
/// (1 ≤ i ≤ #positions) is the i-th letter occurrence in left-to-right order.
Nfa compile_nfa(const RegexAst& ast, std::size_t alphabet_size);

/// The sublanguage A⟨p,q⟩: `nfa` with initial {p} and final {q}.
Nfa sublanguage(const Nfa& nfa, State p, State q);

/// Regular expression for A⟨p,q⟩ where A = compile_nfa(ast). Its language
/// equals that of sublanguage(compile_nfa(ast), p, q).
RegexAst sublanguage_ast(const RegexAst& ast, State p, State q);

bool accepts(const Nfa& nfa, const Word& word);
bool is_empty(const Nfa& nfa);
bool has_epsilon(const Nfa& nfa);

Nfa nfa_union(const Nfa& a, const Nfa& b);
Nfa nfa_concat(const Nfa& a, const Nfa& b);
Nfa nfa_intersect(const Nfa& a, const Nfa& b);

inline constexpr std::size_t kDefaultSubsetCap = std::size_t{1} << 12;

/// Complete DFA for the complement, via the subset construction.
/// Throws ResourceError when more than `cap` subsets are reachable.
Nfa nfa_complement(const Nfa& a, std::size_t cap = kDefaultSubsetCap);

Nfa epsilon_nfa(std::size_t alphabet_size);
Nfa letter_nfa(Symbol a, std::size_t alphabet_size);
Nfa any_star_nfa(std::size_t alphabet_size);

struct InclusionResult {
  bool included = true;
  std::optional<Word> witness;  ///< shortest word in L(left) \ L(right)
};

/// L(left) ⊆ L(right), decided on the fly on left × subsets(right).
InclusionResult check_inclusion(const Nfa& left, const Nfa& right,
                                std::size_t cap = kDefaultSubsetCap);
bool language_inclusion(const Nfa& left, const Nfa& right,
                        std::size_t cap = kDefaultSubsetCap);
bool language_equivalent(const Nfa& a, const Nfa& b, std::size_t cap = kDefaultSubsetCap);

/// All words of L(nfa) of length ≤ max_length, ordered by length then lexicographically.
std::vector<Word> words_up_to(const Nfa& nfa, std::size_t max_length);

struct SreFactor {
  enum class Kind { Plus, LetterSet, AnyStar };
  Kind kind = Kind::LetterSet;
  std::vector<Symbol> letters;  ///< one letter for Plus, nonempty sorted set for LetterSet

  bool operator==(const SreFactor&) const = default;
};
using SreFactors = std::vector<SreFactor>;

/// Factor list when `ast` is syntactically a concatenation of a⁺ and
/// (a₁|…|a_k) factors (and Σ* = %any* when `allow_any_star`); nullopt otherwise.
std::optional<SreFactors> classify_sre(const RegexAst& ast, std::size_t alphabet_size,
                                       bool allow_any_star = false);

}  // namespace crpq
