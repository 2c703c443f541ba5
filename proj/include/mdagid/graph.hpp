#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mdagid {

using VertexId = std::string;
using VertexSet = std::set<VertexId>;
using Edge = std::pair<VertexId, VertexId>;

// Acyclic directed mixed graph over named vertices. A graph with no
// bidirected edges is a plain DAG. Vertices are stored in lexicographic
// order so every query is independent of insertion order.
class Digraph {
 public:
  Digraph() = default;
  Digraph(std::vector<VertexId> vertices, const std::vector<Edge>& directed,
          const std::vector<Edge>& bidirected = {});

  const std::vector<VertexId>& vertices() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool contains(const VertexId& v) const { return index_.count(v) != 0; }
  int index_of(const VertexId& v) const;
  const VertexId& name(int i) const { return names_[static_cast<std::size_t>(i)]; }

  VertexSet parents(const VertexId& v) const;
  VertexSet children(const VertexId& v) const;
  VertexSet siblings(const VertexId& v) const;
  bool has_edge(const VertexId& a, const VertexId& b) const;
  bool has_bidirected(const VertexId& a, const VertexId& b) const;
  bool adjacent(const VertexId& a, const VertexId& b) const;

  std::vector<Edge> directed_edges() const;
  // Each bidirected edge once, endpoints in lexicographic order.
  std::vector<Edge> bidirected_edges() const;
  bool has_bidirected_edges() const;

  const std::vector<int>& parent_ids(int i) const { return parents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& child_ids(int i) const { return children_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& sibling_ids(int i) const { return siblings_[static_cast<std::size_t>(i)]; }

  Digraph induced_subgraph(const VertexSet& keep) const;
  // Removes every edge with an arrowhead at one of the targets.
  Digraph without_incoming(const VertexSet& targets) const;

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.names_ == b.names_ && a.parents_ == b.parents_ && a.siblings_ == b.siblings_;
  }

 private:
  std::vector<VertexId> names_;
  std::map<VertexId, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> siblings_;
};

enum class Relation { Parents, Children, Descendants, Ancestors };

// Descendants and ancestors include v itself.
VertexSet genealogy(const Digraph& g, const VertexId& v, Relation relation);
VertexSet ancestors_of(const Digraph& g, const VertexSet& vs);
VertexSet descendants_of(const Digraph& g, const VertexSet& vs);

struct TopoOrder {
  std::vector<VertexId> sequence;

  std::size_t position(const VertexId& v) const;
  bool precedes(const VertexId& a, const VertexId& b) const { return position(a) < position(b); }
};

// Kahn's algorithm. Among available vertices the smallest (tier, name) is
// emitted first; vertices missing from `tier` sit in tier 0.
TopoOrder topological_order(const Digraph& g, const std::map<VertexId, int>& tier = {});
bool is_topological(const Digraph& g, const TopoOrder& order);

bool d_separated(const Digraph& g, const VertexSet& x, const VertexSet& y, const VertexSet& z);
// Reference implementation: moralized ancestral graph with bidirected edges
// expanded into explicit latent parents.
bool d_separated_moral(const Digraph& g, const VertexSet& x, const VertexSet& y, const VertexSet& z);
// A walk witnessing d-connection, or nullopt when x and y are separated.
std::optional<std::vector<VertexId>> active_path(const Digraph& g, const VertexSet& x, const VertexSet& y,
                                                 const VertexSet& z);

Digraph latent_project(const Digraph& g, const VertexSet& hide);

VertexSet district(const Digraph& g, const VertexId& v);
std::vector<VertexSet> districts(const Digraph& g);

VertexSet markov_pillow(const Digraph& g, const VertexId& v, const TopoOrder& order);

std::string edge_text(const Edge& e);

}  // namespace mdagid
