#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdagid/graph.hpp"

namespace mdagid {

enum class VertexRole { Counterfactual, Indicator, Proxy, Observed, Hidden };
std::string_view to_string(VertexRole role);

struct MDagSpec {
  std::string name = "model";
  std::vector<std::string> missing;
  std::vector<std::string> observed;
  std::vector<std::string> hidden;
  // Probabilistic edges; proxy edges are inserted automatically.
  std::vector<Edge> edges;
  std::map<std::string, int> cardinalities;
};

class MDag {
 public:
  static VertexId counterfactual_of(const std::string& base) { return base + "(1)"; }
  static VertexId indicator_of(const std::string& base) { return "R_" + base; }
  static VertexId proxy_of(const std::string& base) { return base; }

  const std::string& name() const { return name_; }
  const Digraph& graph() const { return graph_; }
  const std::vector<std::string>& missing() const { return missing_; }
  const std::vector<std::string>& observed() const { return observed_; }
  const std::vector<std::string>& hidden() const { return hidden_; }
  std::size_t num_missing() const { return missing_.size(); }

  VertexRole role(const VertexId& v) const;
  bool has_role(const VertexId& v, VertexRole r) const;
  // Base name for counterfactual, indicator and proxy vertices.
  std::optional<std::string> base_of(const VertexId& v) const;
  int base_cardinality(const std::string& base) const;
  // Number of states of a vertex; proxies carry an extra "?" state.
  int cardinality(const VertexId& v) const;

  std::vector<VertexId> indicators() const;
  std::vector<VertexId> counterfactuals() const;
  std::vector<VertexId> proxies() const;
  std::vector<VertexId> vertices_with(VertexRole r) const;
  // Vertices of the observed law: indicators, proxies and observed variables.
  std::vector<VertexId> observed_law_vertices() const;

  const std::vector<Edge>& probabilistic_edges() const { return prob_edges_; }
  bool is_deterministic(const Edge& e) const;
  bool proxies_have_children() const;

  // Priority tiers for the role-layered topological order: counterfactual,
  // observed and hidden vertices before indicators and proxies.
  std::map<VertexId, int> role_tiers() const;

  friend MDag build_mdag(const MDagSpec& spec);

 private:
  std::string name_;
  Digraph graph_;
  std::map<VertexId, VertexRole> roles_;
  std::map<VertexId, std::string> base_;
  std::vector<std::string> missing_;
  std::vector<std::string> observed_;
  std::vector<std::string> hidden_;
  std::map<std::string, int> cards_;
  std::vector<Edge> prob_edges_;
};

MDag build_mdag(const MDagSpec& spec);
MDag build_mdag(const std::vector<std::string>& missing, const std::vector<std::string>& observed,
                const std::vector<std::string>& hidden, const std::vector<Edge>& prob_edges,
                const std::map<std::string, int>& cardinalities = {});

// Text model format: `missing N [card=k]`, `observed W`, `hidden U`,
// `edge A -> B`, `#` comments. Declarations precede edges.
MDag parse_mdag(std::string_view text, const std::string& name = "model");
std::string to_text(const MDag& m);

// Role-layered topological order of g (a graph over vertices of m).
TopoOrder layered_order(const MDag& m, const Digraph& g);

enum class MechanismClass { MCAR, MAR, MNAR };
std::string_view to_string(MechanismClass c);
MechanismClass classify_mechanism(const MDag& m);

enum class WitnessKind { SelfCensoring, Colluder, CrissCross, ColludingPath };
std::string_view to_string(WitnessKind k);
WitnessKind witness_kind_from_string(std::string_view s);

struct StructureWitness {
  WitnessKind kind;
  std::vector<VertexId> vertices;
  // Edges as they appear in the graph; a bidirected edge is never used here.
  std::vector<Edge> edges;

  std::string describe() const;
  friend bool operator==(const StructureWitness&, const StructureWitness&) = default;
};

std::vector<StructureWitness> detect_self_censoring(const MDag& m);
std::vector<StructureWitness> detect_colluders(const MDag& m);
std::vector<StructureWitness> detect_criss_cross(const MDag& m);
// Paths from L_k(1) to R_k whose colliders are counterfactual, indicator or
// observed vertices and whose non-colliders are hidden.
std::vector<StructureWitness> detect_colluding_paths(const MDag& m);
// Colliders on a path witness, in path order.
std::vector<VertexId> path_colliders(const MDag& m, const StructureWitness& w);

enum class CanonicalModel {
  Permutation2,
  BlockParallel2,
  BlockSequential2,
  MarExample2,
  SeqPar3,
  PartialOrder3,
  OutsideR4,
  OddsRatio3,
  OddsRatio3Equiv,
  HiddenSix,
  SelfCensor1,
  CrissCross2,
  ConfoundedOutcome,
};

std::vector<CanonicalModel> canonical_models();
std::string_view to_string(CanonicalModel c);
CanonicalModel canonical_from_string(std::string_view name);
MDag canonical_model(CanonicalModel c);
MDag canonical_model(std::string_view name);

}  // namespace mdagid
