#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdagid/functional.hpp"
#include "mdagid/graph.hpp"
#include "mdagid/mdag.hpp"

namespace mdagid {

enum class FactorProvenance { Original, Pseudo, Deterministic };
std::string_view to_string(FactorProvenance p);

struct Factor {
  VertexId head;
  VertexSet tail;
  FactorProvenance provenance;
  // Members of the head's district when bidirected edges reach it.
  VertexSet district;
};

// A conditional q(v | conditioning) read off a kernel, with the indicators
// that had to be evaluated at 1 so that counterfactual arguments become
// observable.
struct IdentifiedConditional {
  VertexId vertex;
  VertexSet conditioning;
  Expr conditional;  // head variable left free
  VertexSet swapped;
  VertexSet induced_selection;
};

// Symbolic kernel q(random ‖ fixed) over the vertices of an m-DAG, stored as
// a conditional graph plus an expression over the observed law. Values are
// persistent: every operation returns a new kernel.
class Kernel {
 public:
  static Kernel from_mdag(const MDag& m);

  const MDag& model() const { return *model_; }
  const Digraph& graph() const { return graph_; }
  // Fixed vertices; nullopt marks a vertex fixed at a free index value.
  const std::map<VertexId, std::optional<int>>& fixed() const { return fixed_; }
  const std::map<VertexId, int>& selection() const { return selection_; }
  const std::map<VertexId, int>& context() const { return context_; }
  const VertexSet& marginalized() const { return marginalized_; }
  const std::optional<Expr>& expression() const { return expr_; }
  bool identified() const { return expr_.has_value(); }

  bool is_fixed(const VertexId& v) const { return fixed_.count(v) != 0; }
  bool is_selected(const VertexId& v) const { return selection_.count(v) != 0; }
  bool is_random(const VertexId& v) const;
  // Name of the observed-law variable carrying v's value, if any.
  std::optional<std::string> variable_of(const VertexId& v) const;
  std::vector<Factor> factors() const;

  Kernel marginalize(const VertexSet& s) const;
  Kernel condition(const std::map<VertexId, int>& assignment) const;
  Kernel evaluate_at(const std::map<VertexId, int>& assignment) const;
  Kernel fix(const VertexId& v, std::optional<int> value, const std::optional<Expr>& propensity) const;
  Kernel consistency_swap(const std::string& base) const;
  Expr compile() const;

  // q(v | conditioning) when it can be read from this kernel by consistency
  // swaps and a d-separation check; nullopt otherwise.
  std::optional<IdentifiedConditional> identify_conditional(const VertexId& v, const VertexSet& conditioning,
                                                            bool require_no_bidirected = true) const;
  // Fixes a set of indicators at 1 in parallel using conditionals read off
  // this kernel.
  Kernel fix_indicators(const std::vector<IdentifiedConditional>& group) const;
  // Fixes a counterfactual whose indicator is already fixed, at a free index.
  Kernel fix_counterfactual(const IdentifiedConditional& c) const;

  std::string state_key() const;

 private:
  Kernel() = default;
  void drop_merged_proxy(const VertexId& indicator);

  std::shared_ptr<const MDag> model_;
  Digraph graph_;
  std::map<VertexId, std::optional<int>> fixed_;
  std::map<VertexId, int> selection_;
  std::map<VertexId, int> context_;
  VertexSet marginalized_;
  std::set<std::string> swapped_;
  std::optional<Expr> expr_;
};

// Kernel for a propensity query: the conditional of r given its parents in
// the kernel graph, evaluated at every indicator = 1.
Expr compile_propensity(const Kernel& k, const VertexId& r);

}  // namespace mdagid
