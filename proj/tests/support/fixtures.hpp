#pragma once

// Small helpers shared by the unit tests.

#include <string>

#include "crpq/query.hpp"

namespace fx {

inline crpq::AlphabetRef ab() {
  static crpq::AlphabetRef a = std::make_shared<crpq::Alphabet>(std::vector<std::string>{"a", "b"});
  return a;
}

/// A query body such as "q(x,y){ x -[a+]-> y }" over {a,b}.
inline crpq::Crpq q(const std::string& body, const crpq::AlphabetRef& alphabet = ab()) {
  return crpq::parse_crpq_with(body, alphabet);
}

inline crpq::Ucrpq u(const std::string& body, const crpq::AlphabetRef& alphabet = ab()) {
  return crpq::as_union(q(body, alphabet));
}

/// Database from "u0 a u1, u1 b u2" style triples over {a,b}; nodes are
/// declared in first-seen order after `nodes` isolated ones n0..n{nodes-1}.
inline crpq::GraphDb db(const std::string& triples, std::size_t nodes = 0, const crpq::AlphabetRef& alphabet = ab()) {
  crpq::GraphDb g;
  g.alphabet = alphabet;
  for (std::size_t i = 0; i < nodes; ++i) g.add_node("n" + std::to_string(i));
  std::size_t pos = 0;
  while (pos < triples.size()) {
    std::size_t end = triples.find(',', pos);
    if (end == std::string::npos) end = triples.size();
    std::string part = triples.substr(pos, end - pos);
    pos = end + 1;
    std::size_t a = part.find_first_not_of(' ');
    if (a == std::string::npos) continue;
    std::string s, l, t;
    std::size_t i = a;
    auto word = [&](std::string& out) {
      while (i < part.size() && part[i] == ' ') ++i;
      while (i < part.size() && part[i] != ' ') out += part[i++];
    };
    word(s);
    word(l);
    word(t);
    crpq::NodeId from = g.add_node(s);
    crpq::NodeId to = g.add_node(t);
    g.add_edge(from, alphabet->find(l).value(), to);
  }
  return g;
}

}  // namespace fx
