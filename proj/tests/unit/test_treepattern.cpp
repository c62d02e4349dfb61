#include <doctest.h>

#include "crpq/error.hpp"
#include "crpq/treepattern.hpp"
#include "../support/generators.hpp"

using namespace crpq;

namespace {

TreePattern random_tree(gen::Rng& rng, std::size_t max_nodes) {
  TreePattern t;
  std::size_t n = gen::uniform(rng, 1, max_nodes);
  const char* letters[] = {"a", "b", "c"};
  for (std::size_t i = 0; i < n; ++i) {
    TreePattern::Node node;
    if (gen::uniform(rng, 0, 2) != 0) node.label = letters[gen::uniform(rng, 0, 2)];
    if (i > 0) {
      node.parent = gen::uniform(rng, 0, i - 1);
      node.transitive = gen::uniform(rng, 0, 1) == 1;
    }
    t.nodes.push_back(node);
  }
  return t;
}

}  // namespace

TEST_CASE("encoding examples") {
  Crpq one = encode(parse_tree_pattern("a\n"));
  REQUIRE(one.num_atoms() == 1);
  CHECK(one.atoms[0].source == one.atoms[0].target);
  CHECK(one.atoms[0].label->key == "a");
  CHECK(one.arity() == 0);

  Crpq edge = encode(parse_tree_pattern("*\n  -> *\n"));
  REQUIRE(edge.num_atoms() == 1);
  CHECK(edge.atoms[0].label->key == "%marker");
  CHECK(edge.vars == std::vector<std::string>{"n0", "n1"});

  Crpq tr = encode(parse_tree_pattern("a\n  => b\n"));
  std::vector<std::string> atoms;
  for (const auto& a : tr.atoms) atoms.push_back(tr.vars[a.source] + " " + a.label->key + " " + tr.vars[a.target]);
  CHECK(atoms == std::vector<std::string>{"n0 a n0", "n0 %marker+ n1", "n1 b n1"});
  CHECK(tr.alphabet->letters() == std::vector<std::string>{"a", "b", "%marker"});

  for (const char* text : {"a\n", "*\n  -> *\n", "a\n  => b\n"}) {
    TreePattern t = parse_tree_pattern(text);
    auto back = decode(encode(t));
    REQUIRE(back);
    CHECK(*back == t);
    CHECK(to_text(*back) == text);
  }
}

TEST_CASE("queries outside the image") {
  auto alpha = std::make_shared<Alphabet>(std::vector<std::string>{"a", "b", "%marker"});
  auto q = [&](const char* body) { return parse_crpq_with(body, alpha); };
  CHECK_FALSE(decode(q("q(){ x -[(%marker%marker)+]-> y }")));
  CHECK_FALSE(decode(q("q(){ x -[a]-> x; x -[b]-> x }")));
  CHECK_FALSE(decode(q("q(){ x -[a]-> x; x -[a]-> x }")));
  CHECK_FALSE(decode(q("q(x){ x -[a]-> x }")));
  CHECK_FALSE(decode(q("q(){ x -[%marker]-> y; z -[%marker]-> y }")));  // two parents
  CHECK_FALSE(decode(q("q(){ x -[%marker]-> y; y -[%marker]-> x }")));  // no root
  CHECK_FALSE(decode(q("q(){ x -[%marker]-> y; z -[a]-> z }")));        // two roots
  CHECK_FALSE(decode(q("q(){ x -[%marker]-> x }")));
  CHECK_FALSE(decode(q("q(){ x -[a]-> y }")));
  CHECK(decode(q("q(){ x -[%marker]-> y; x -[%marker+]-> z; z -[b]-> z }")));
}

TEST_CASE("outline format") {
  TreePattern t = parse_tree_pattern("# comment\na\n  -> *\n    => c\n  => b\n");
  REQUIRE(t.nodes.size() == 4);
  CHECK(t.nodes[2].parent == 1u);
  CHECK(t.nodes[2].transitive);
  CHECK(t.nodes[3].parent == 0u);
  CHECK_FALSE(t.nodes[1].label);
  CHECK(to_text(t) == "a\n  -> *\n    => c\n  => b\n");
  CHECK_THROWS_AS(parse_tree_pattern(""), ParseError);
  CHECK_THROWS_AS(parse_tree_pattern("-> a\n"), ParseError);
  CHECK_THROWS_AS(parse_tree_pattern("a\nb\n"), ParseError);
  CHECK_THROWS_AS(parse_tree_pattern("a\n  b\n"), ParseError);
  TreePattern bad;
  bad.nodes = {{"a", std::nullopt, false}, {"b", 2, false}, {"c", 1, false}};
  CHECK_THROWS_AS(validate(bad), InputError);
}

TEST_CASE("round trip and size on random tree patterns") {
  gen::Rng rng(91);
  for (int i = 0; i < 500; ++i) {
    TreePattern t = random_tree(rng, 6).preorder();
    Crpq q = encode(t);
    std::size_t labelled = 0;
    for (const auto& n : t.nodes) labelled += n.label.has_value();
    CHECK(q.num_atoms() == t.nodes.size() - 1 + labelled);
    auto back = decode(q);
    REQUIRE(back);
    CHECK(*back == t);
    // the text form survives a round trip through the query parser
    auto again = decode(parse_crpq_with(to_text(q).substr(to_text(q).find("query")), q.alphabet));
    REQUIRE(again);
    CHECK(*again == t);
  }
}
