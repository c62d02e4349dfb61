#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crpq/query.hpp"

namespace crpq {

/// Vertex set plus labelled edges; labels are interned integers. Both CQs and
/// databases are viewed this way for homomorphism search.
struct LabeledGraph {
  struct Edge {
    std::uint32_t source;
    std::uint32_t label;
    std::uint32_t target;
  };
  std::size_t num_vertices = 0;
  std::vector<Edge> edges;
  /// Distinguished vertices mapped positionally by every homomorphism.
  std::vector<std::uint32_t> outputs;
};

/// Interns label keys so that graphs built with the same interner share ids.
class LabelInterner {
 public:
  std::uint32_t id(const std::string& key);

 private:
  std::vector<std::string> keys_;
};

/// Atoms become edges labelled by their key; outputs are the query outputs.
LabeledGraph to_labeled_graph(const Crpq& q, LabelInterner& interner);
/// Edges labelled by letter names; `outputs` become the distinguished vertices.
LabeledGraph to_labeled_graph(const GraphDb& db, LabelInterner& interner, const std::vector<NodeId>& outputs = {});

struct Hom {
  std::vector<std::uint32_t> map;
};

struct HomOptions {
  /// Partial assignment; entries equal to kFree are unconstrained.
  std::vector<std::uint32_t> pin;
  /// Injective on vertices, and parallel edges map to distinct parallel edges.
  bool injective = false;
  /// Map outputs positionally (src.outputs[i] ↦ tgt.outputs[i]).
  bool respect_outputs = true;
  /// Extra condition on complete maps; rejected maps keep the search going.
  std::function<bool(const Hom&)> accept;
};
inline constexpr std::uint32_t kFree = 0xffffffffu;

std::optional<Hom> find_hom(const LabeledGraph& src, const LabeledGraph& tgt, const HomOptions& options = {});
bool is_valid_hom(const Hom& h, const LabeledGraph& src, const LabeledGraph& tgt);
/// Every target edge is the image of some source edge.
bool is_strong_onto(const Hom& h, const LabeledGraph& src, const LabeledGraph& tgt);

/// Query-level conveniences (labels compared by key, outputs pinned positionally).
std::optional<Hom> find_hom(const Crpq& src, const Crpq& tgt);
bool hom_exists(const Crpq& src, const Crpq& tgt);
/// A homomorphism hitting every target atom.
std::optional<Hom> find_strong_onto_hom(const Crpq& src, const Crpq& tgt);
bool hom_equivalent(const Crpq& p, const Crpq& q);
/// An embedding: injective on variables and on atoms.
std::optional<Hom> find_embedding(const Crpq& src, const Crpq& tgt);
bool is_isomorphic(const Crpq& p, const Crpq& q);

/// The core: repeatedly drops an atom (or an isolated non-output variable)
/// whose removal leaves a query the original still maps into.
Crpq core(const Crpq& q);

}  // namespace crpq
