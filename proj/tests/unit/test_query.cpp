#include <doctest.h>

#include "crpq/error.hpp"
#include "crpq/query.hpp"
#include "../support/fixtures.hpp"
#include "../support/generators.hpp"

using namespace crpq;

TEST_CASE("parse the two-atom example") {
  Ucrpq u = parse_query("query q(x,y){ x -[a+]-> y; x -[(aa)+]-> y; }");
  REQUIRE(u.disjuncts.size() == 1);
  const Crpq& q = u.disjuncts[0];
  CHECK(q.num_atoms() == 2);
  CHECK(q.arity() == 2);
  CHECK(q.vars == std::vector<std::string>{"x", "y"});
  CHECK(q.atoms[0].label->key == "a+");
  CHECK(q.atoms[1].label->key == "(aa)+");
  CHECK(u.alphabet->letters() == std::vector<std::string>{"a"});
}

TEST_CASE("boolean query with no atoms") {
  Crpq q = parse_crpq("query q(){ }");
  CHECK(q.arity() == 0);
  CHECK(q.num_atoms() == 0);
}

TEST_CASE("union blocks") {
  const char* text =
      "alphabet a, b;\n"
      "query q1(x,y){ x -[a]-> y; }\n"
      "query q2(x,y){ x -[b]-> y; }\n"
      "query q3(x){ x -[b]-> x; }\n"
      "union { q1 | q2 }\n";
  Ucrpq u = parse_query(text);
  REQUIRE(u.disjuncts.size() == 2);
  CHECK(u.disjuncts[1].name == "q2");
  CHECK_THROWS_AS(parse_query("query q1(x,y){ x -[a]-> y; } query q2(x){ x -[a]-> x; } union { q1 | q2 }"), InputError);
  CHECK_THROWS_AS(parse_query("query q1(x){ x -[a]-> x; } query q1(x){ x -[a]-> x; }"), ParseError);
  CHECK_THROWS_AS(parse_query("query q1(x){ x -[a]-> x; } union { q9 }"), ParseError);
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(parse_query("query q(x,y){ x -[a]- y; }"), ParseError);
  CHECK_THROWS_AS(parse_query("query q(x,y { x -[a]-> y; }"), ParseError);
  CHECK_THROWS_AS(parse_query("query q(x,y){ x -[(a]-> y; }"), ParseError);
  CHECK_THROWS_AS(parse_query("alphabet a; query q(x,y){ x -[b]-> y; }"), InputError);
}

TEST_CASE("output variables may repeat") {
  Crpq q = parse_crpq("query q(x,x){ x -[a]-> y; }");
  CHECK(q.outputs == std::vector<VarId>{0, 0});
  CHECK(q.is_output(0));
  CHECK_FALSE(q.is_output(1));
}

TEST_CASE("alphabet header and extra letters") {
  Crpq q = parse_crpq("alphabet b, a, c;\nquery q(x,y){ x -[a]-> y; }");
  CHECK(q.alphabet->letters() == std::vector<std::string>{"b", "a", "c"});
  Crpq r = parse_crpq("query q(x,y){ x -[b]-> y; }", {"z"});
  CHECK(r.alphabet->letters() == std::vector<std::string>{"b", "z"});
}

TEST_CASE("serialization round-trips random queries") {
  gen::Rng rng(21);
  auto alpha = gen::letters(2);
  for (int i = 0; i < 300; ++i) {
    gen::QueryShape shape{0, 4, 4, 3};
    Crpq q = gen::query(rng, alpha, shape, [](gen::Rng& r) { return gen::regex(r, 2, gen::uniform(r, 1, 6)); });
    std::string text = to_text(q);
    CAPTURE(text);
    Crpq back = parse_crpq(text);
    auto name = [](const Crpq& c, VarId v) { return c.vars[v]; };
    REQUIRE(back.arity() == q.arity());
    for (std::size_t k = 0; k < q.arity(); ++k) CHECK(name(back, back.outputs[k]) == name(q, q.outputs[k]));
    REQUIRE(back.num_atoms() == q.num_atoms());
    for (std::size_t k = 0; k < q.num_atoms(); ++k) {
      CHECK(name(back, back.atoms[k].source) == name(q, q.atoms[k].source));
      CHECK(name(back, back.atoms[k].target) == name(q, q.atoms[k].target));
      CHECK(back.atoms[k].label->ast == q.atoms[k].label->ast);
    }
    CHECK(to_text(back) == text);
  }
}

TEST_CASE("union serialization round-trips") {
  const char* text =
      "alphabet a, b;\n"
      "query q1(x,y){ x -[a]-> y; }\n"
      "query q2(x,y){ x -[b+]-> y; y -[a]-> y; }\n";
  Ucrpq u = parse_query(text);
  std::string out = to_text(u);
  Ucrpq back = parse_query(out);
  CHECK(to_text(back) == out);
  CHECK(back.disjuncts.size() == 2);
}

TEST_CASE("underlying graph") {
  Multigraph g = underlying_graph(fx::q("q(x,y){ x -[a]-> y; x -[b]-> y }"));
  CHECK(g.num_vertices() == 2);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0].source == 0);
  CHECK(g.edges[1].target == 1);
  Multigraph loop = underlying_graph(fx::q("q(x){ x -[a]-> x }"));
  REQUIRE(loop.edges.size() == 1);
  CHECK(loop.edges[0].source == loop.edges[0].target);
  Multigraph path = underlying_graph(fx::q("q(x,y){ x -[a]-> t; t -[b]-> y }"));
  CHECK(path.num_vertices() == 3);
  CHECK(path.edges.size() == 2);
}

TEST_CASE("underlying graph keeps one edge per atom") {
  gen::Rng rng(22);
  auto alpha = gen::letters(2);
  for (int i = 0; i < 200; ++i) {
    Crpq q = gen::query(rng, alpha, {0, 6, 5, 2}, [](gen::Rng& r) { return gen::regex(r, 2, 2); });
    Multigraph g = underlying_graph(q);
    CHECK(g.edges.size() == q.num_atoms());
    CHECK(g.num_vertices() == q.num_vars());
  }
}

TEST_CASE("database JSON") {
  const std::string text = R"({"nodes":["u0","u1"],"edges":[["u0","a","u1"]]})";
  GraphDb g = load_graphdb(text);
  CHECK(save_graphdb(g) == text);
  CHECK_THROWS_AS(load_graphdb(R"({"nodes":["u0"],"edges":[["u0","a","u9"]]})"), InputError);
  CHECK_THROWS_AS(load_graphdb(R"({"nodes":["u0"],"edges":[)"), ParseError);
  CHECK_THROWS_AS(load_graphdb(R"({"nodes":"u0","edges":[]})"), InputError);
  GraphDb d = load_graphdb(R"({"nodes":["u0","u1"],"edges":[["u0","a","u1"],["u0","a","u1"]]})");
  CHECK(d.edges.size() == 1);
  CHECK(graphdb_letters(R"({"nodes":["u"],"edges":[["u","b","u"],["u","a","u"]]})") ==
        std::vector<std::string>{"b", "a"});
  CHECK_THROWS_AS(load_graphdb(R"({"nodes":["u"],"edges":[["u","c","u"]]})", fx::ab()), InputError);
}

TEST_CASE("rebasing onto a larger alphabet") {
  Crpq q = parse_crpq("query q(x,y){ x -[b+]-> y; }");
  auto big = merge_alphabets(fx::ab(), q.alphabet);
  CHECK(big->letters() == std::vector<std::string>{"a", "b"});
  Crpq r = rebase(q, big);
  CHECK(r.atoms[0].label->key == "b+");
  CHECK(r.atoms[0].label->nfa.alphabet_size() == 2);
  CHECK_THROWS_AS(rebase(fx::q("q(x){ x -[a]-> x }"), q.alphabet), InputError);
}

TEST_CASE("drop_unused_vars renumbers") {
  Crpq q = fx::q("q(z){ x -[a]-> y }");
  q.var("w");
  q.drop_unused_vars();
  CHECK(q.vars == std::vector<std::string>{"z", "x", "y"});
}

TEST_CASE("fresh variables avoid clashes") {
  Crpq q = fx::q("q(t0_0){ t0_0 -[a]-> y }");
  VarId v = q.fresh_var("t0_0");
  CHECK(q.vars[v] != "t0_0");
  CHECK(q.find_var(q.vars[v]) == v);
}
