#pragma once

// Tree patterns and their encoding as Boolean CRPQs over 𝔸 ⊔ {%marker}.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crpq/query.hpp"

namespace crpq {

struct TreePattern {
  struct Node {
    std::optional<std::string> label;  ///< nullopt is the wildcard *
    std::optional<std::size_t> parent;
    bool transitive = false;  ///< kind of the edge from the parent
    bool operator==(const Node&) const = default;
  };
  std::vector<Node> nodes;  ///< node 0 is the root

  std::vector<std::size_t> children(std::size_t n) const;
  /// Nodes renumbered in depth-first preorder, children kept in index order.
  TreePattern preorder() const;
  bool operator==(const TreePattern&) const = default;
};

/// Throws InputError unless the parent links form a tree rooted at node 0.
void validate(const TreePattern& t);

/// Outline format: one node per line, `*` or a letter, children indented
/// below their parent with `->` (simple) or `=>` (transitive). `#` starts a comment.
///   a
///     -> *
///     => b
TreePattern parse_tree_pattern(std::string_view text);
std::string to_text(const TreePattern& t);

/// Variables n0, n1, … in preorder. Each labelled node gets a self-loop with
/// its letter; simple edges become %marker atoms, transitive ones %marker+.
/// Letters of `base` come first in the alphabet, %marker last.
Crpq encode(const TreePattern& t, const AlphabetRef& base = nullptr);

/// The preimage (in preorder) when `q` is syntactically an encoding.
std::optional<TreePattern> decode(const Crpq& q);

}  // namespace crpq
