#include <doctest.h>

#include "crpq/automata.hpp"
#include "crpq/error.hpp"
#include "../support/generators.hpp"
#include "../support/oracles.hpp"

using namespace crpq;

namespace {

const Alphabet ab({"a", "b"});

RegexAst re(const char* s) { return parse_regex(s, ab); }
Nfa nfa(const char* s) { return compile_nfa(re(s), ab.size()); }
Word w(const char* s) { return ab.parse_word(s); }

}  // namespace

TEST_CASE("parse_regex builds the expected trees") {
  CHECK(re("a+ . (a|b)") ==
        RegexAst::concat({RegexAst::plus(RegexAst::letter(0)), RegexAst::alt({RegexAst::letter(0), RegexAst::letter(1)})}));
  CHECK(re("%any*") == RegexAst::star(RegexAst::any()));
  CHECK(re("(aa)+") == RegexAst::plus(RegexAst::concat({RegexAst::letter(0), RegexAst::letter(0)})));
  CHECK(re("%eps") == RegexAst::epsilon());
  CHECK(re("ab?") == RegexAst::concat({RegexAst::letter(0), RegexAst::opt(RegexAst::letter(1))}));
}

TEST_CASE("parse_regex reports errors") {
  CHECK_THROWS_AS(re("(a"), ParseError);
  CHECK_THROWS_AS(re("a|"), ParseError);
  CHECK_THROWS_AS(re("+a"), ParseError);
  CHECK_THROWS_AS(re("c"), InputError);
  CHECK_THROWS_AS(re("%nope"), InputError);
  try {
    re("a)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 1);
  }
}

TEST_CASE("multi-character letters parse longest-first") {
  Alphabet alpha({"a", "ab", "b"});
  auto r = parse_regex("ab.a b", alpha);
  CHECK(r == RegexAst::concat({RegexAst::letter(1), RegexAst::letter(0), RegexAst::letter(2)}));
  CHECK(to_string(r, alpha) == "ab.a.b");
}

TEST_CASE("printing round-trips random expressions") {
  gen::Rng rng(11);
  for (int i = 0; i < 400; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 9));
    std::string s = to_string(r, ab);
    CAPTURE(s);
    CHECK(parse_regex(s, ab) == r);
  }
}

TEST_CASE("position automata of the worked labels") {
  Nfa p = nfa("a+");
  CHECK(p.num_states() == 2);
  CHECK(p.initial_states() == std::vector<State>{0});
  CHECK(p.final_states() == std::vector<State>{1});
  CHECK(p.successors(0, 0) == std::vector<State>{1});
  CHECK(p.successors(1, 0) == std::vector<State>{1});
  CHECK(p.num_transitions() == 2);

  Nfa q = nfa("(aa)+");
  CHECK(q.num_states() == 3);
  CHECK(q.successors(0, 0) == std::vector<State>{1});
  CHECK(q.successors(1, 0) == std::vector<State>{2});
  CHECK(q.successors(2, 0) == std::vector<State>{1});
  CHECK(q.final_states() == std::vector<State>{2});

  Nfa e = nfa("%eps");
  CHECK(e.num_states() == 1);
  CHECK(e.is_initial(0));
  CHECK(e.is_final(0));
}

TEST_CASE("compile_nfa agrees with the direct matcher") {
  gen::Rng rng(1);
  const auto words = oracle::all_words(2, 6);
  for (int i = 0; i < 300; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 8));
    Nfa n = compile_nfa(r, 2);
    CAPTURE(to_string(r, ab));
    CHECK(n.num_states() == ast_positions(r) + 1);
    for (const auto& x : words) REQUIRE(accepts(n, x) == oracle::regex_match(r, x));
  }
}

TEST_CASE("membership") {
  CHECK(accepts(nfa("(aa)+"), w("aa")));
  CHECK_FALSE(accepts(nfa("(aa)+"), w("a")));
  CHECK(accepts(nfa("a*"), w("%eps")));
}

TEST_CASE("sublanguages of a+") {
  Nfa p = nfa("a+");
  const auto words = oracle::all_words(2, 6);
  for (const auto& x : words) {
    CHECK(accepts(sublanguage(p, 0, 1), x) == oracle::regex_match(re("a+"), x));
    CHECK(accepts(sublanguage(p, 1, 1), x) == oracle::regex_match(re("a*"), x));
  }
  CHECK(to_string(sublanguage_ast(re("a+"), 0, 1), ab) == "a+");
  CHECK(to_string(sublanguage_ast(re("a+"), 1, 1), ab) == "a*");
  CHECK(language_equivalent(compile_nfa(sublanguage_ast(re("(aa)+"), 1, 2), 2), nfa("a(aa)*")));
  CHECK_THROWS_AS(sublanguage(p, 0, 5), InputError);
}

TEST_CASE("an isolated state yields exactly the empty word") {
  Nfa n(3, 2);
  n.set_initial(0);
  n.set_final(1);
  n.add_transition(0, 0, 1);
  Nfa s = sublanguage(n, 2, 2);
  CHECK(accepts(s, {}));
  CHECK(words_up_to(s, 4) == std::vector<Word>{{}});
}

TEST_CASE("sublanguage expressions denote the automaton sublanguages") {
  gen::Rng rng(2);
  const auto words = oracle::all_words(2, 5);
  for (int i = 0; i < 150; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 8));
    Nfa n = compile_nfa(r, 2);
    CAPTURE(to_string(r, ab));
    for (State p = 0; p < n.num_states(); ++p)
      for (State q = 0; q < n.num_states(); ++q) {
        RegexAst s = sublanguage_ast(r, p, q);
        Nfa sn = sublanguage(n, p, q);
        CAPTURE(p);
        CAPTURE(q);
        CAPTURE(to_string(s, ab));
        for (const auto& x : words) REQUIRE(oracle::regex_match(s, x) == accepts(sn, x));
      }
  }
}

TEST_CASE("sublanguages along accepting runs concatenate into the language") {
  gen::Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 2, 7));
    Nfa n = compile_nfa(r, 2);
    // random state sequences of length 2 from the start state to a final state
    for (State mid = 0; mid < n.num_states(); ++mid)
      for (State f : n.final_states()) {
        Nfa cat = nfa_concat(sublanguage(n, 0, mid), sublanguage(n, mid, f));
        for (const auto& x : words_up_to(cat, 8)) REQUIRE(oracle::regex_match(r, x));
      }
  }
}

TEST_CASE("language operations") {
  Nfa all = any_star_nfa(2);
  CHECK(is_empty(nfa_complement(all)));
  Nfa both = nfa_intersect(nfa("a+"), nfa("(aa)+"));
  CHECK(accepts(both, w("aa")));
  CHECK_FALSE(accepts(both, w("a")));
  Nfa ab_cat = nfa_concat(letter_nfa(0, 2), letter_nfa(1, 2));
  CHECK(words_up_to(ab_cat, 6) == std::vector<Word>{w("ab")});
  CHECK(has_epsilon(nfa("a*")));
  CHECK_FALSE(has_epsilon(nfa("a+")));
  CHECK(is_empty(nfa("%empty")));
}

TEST_CASE("language operations agree with the matcher") {
  gen::Rng rng(4);
  const auto words = oracle::all_words(2, 5);
  for (int i = 0; i < 80; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 6));
    RegexAst s = gen::regex(rng, 2, gen::uniform(rng, 1, 6));
    Nfa nr = compile_nfa(r, 2), ns = compile_nfa(s, 2);
    Nfa u = nfa_union(nr, ns), c = nfa_concat(nr, ns), x = nfa_intersect(nr, ns), k = nfa_complement(nr);
    RegexAst rs = RegexAst::concat({r, s});
    for (const auto& v : words) {
      bool in_r = oracle::regex_match(r, v), in_s = oracle::regex_match(s, v);
      REQUIRE(accepts(u, v) == (in_r || in_s));
      REQUIRE(accepts(x, v) == (in_r && in_s));
      REQUIRE(accepts(k, v) == !in_r);
      REQUIRE(accepts(c, v) == oracle::regex_match(rs, v));
    }
  }
}

TEST_CASE("complement respects its cap") {
  // (a|b)*a(a|b)^n needs 2^(n+1) subsets
  Nfa n = nfa("(a|b)*a(a|b)(a|b)(a|b)(a|b)(a|b)");
  CHECK_THROWS_AS(nfa_complement(n, 16), ResourceError);
  CHECK_NOTHROW(nfa_complement(n, 1 << 8));
}

TEST_CASE("inclusion with witnesses") {
  CHECK(language_inclusion(nfa("(aa)+"), nfa("a+")));
  auto r = check_inclusion(nfa("a+"), nfa("(aa)+"));
  CHECK_FALSE(r.included);
  REQUIRE(r.witness);
  CHECK(*r.witness == w("a"));
  CHECK(language_inclusion(nfa("(a|b)*b"), nfa("(a|b)*b")));
}

TEST_CASE("inclusion agrees with bounded word comparison") {
  gen::Rng rng(5);
  const auto words = oracle::all_words(2, 8);
  for (int i = 0; i < 120; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 6));
    RegexAst s = gen::regex(rng, 2, gen::uniform(rng, 1, 6));
    auto res = check_inclusion(compile_nfa(r, 2), compile_nfa(s, 2));
    if (res.included) {
      for (const auto& v : words)
        if (oracle::regex_match(r, v)) REQUIRE(oracle::regex_match(s, v));
    } else {
      REQUIRE(res.witness);
      CHECK(oracle::regex_match(r, *res.witness));
      CHECK_FALSE(oracle::regex_match(s, *res.witness));
    }
  }
}

TEST_CASE("inclusion is reflexive and transitive on a random pool") {
  gen::Rng rng(6);
  std::vector<Nfa> pool;
  for (int i = 0; i < 14; ++i) pool.push_back(compile_nfa(gen::regex(rng, 2, gen::uniform(rng, 1, 6)), 2));
  for (const auto& a : pool) CHECK(language_inclusion(a, a));
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool)
        if (language_inclusion(a, b) && language_inclusion(b, c)) REQUIRE(language_inclusion(a, c));
}

TEST_CASE("words_up_to lists the language in order") {
  gen::Rng rng(7);
  const auto words = oracle::all_words(2, 5);
  for (int i = 0; i < 60; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 7));
    std::vector<Word> expect;
    for (const auto& v : words)
      if (oracle::regex_match(r, v)) expect.push_back(v);
    CHECK(words_up_to(compile_nfa(r, 2), 5) == expect);
  }
}

TEST_CASE("SRE classification") {
  auto f = classify_sre(re("a+.(a|b)"), 2);
  REQUIRE(f);
  CHECK(*f == SreFactors{{SreFactor::Kind::Plus, {0}}, {SreFactor::Kind::LetterSet, {0, 1}}});
  CHECK_FALSE(classify_sre(re("(aa)+"), 2));
  CHECK_FALSE(classify_sre(re("%any*"), 2));
  auto g = classify_sre(re("%any*"), 2, true);
  REQUIRE(g);
  CHECK(*g == SreFactors{{SreFactor::Kind::AnyStar, {}}});
  CHECK_FALSE(classify_sre(re("a*"), 2));
  CHECK_FALSE(classify_sre(re("%eps"), 2));
}

TEST_CASE("SRE expressions never contain the empty word") {
  gen::Rng rng(8);
  int classified = 0;
  for (int i = 0; i < 2000; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 6));
    if (!classify_sre(r, 2)) continue;
    ++classified;
    CHECK_FALSE(has_epsilon(compile_nfa(r, 2)));
  }
  CHECK(classified > 50);
}

TEST_CASE("simplifying constructors preserve the language") {
  gen::Rng rng(9);
  const auto words = oracle::all_words(2, 6);
  for (int i = 0; i < 300; ++i) {
    RegexAst r = gen::regex(rng, 2, gen::uniform(rng, 1, 9));
    RegexAst s = simplify(r);
    CAPTURE(to_string(r, ab));
    CAPTURE(to_string(s, ab));
    for (const auto& v : words) REQUIRE(oracle::regex_match(r, v) == oracle::regex_match(s, v));
  }
  CHECK(to_string(make_concat({re("a*"), re("a")}), ab) == "a+");
  CHECK(to_string(make_concat({re("(aa)*"), re("a"), re("a")}), ab) == "(aa)+");
  CHECK(to_string(make_union({re("a+"), re("%eps")}), ab) == "a*");
  CHECK(to_string(make_concat({re("%any*"), re("%any*")}), ab) == "%any*");
}
