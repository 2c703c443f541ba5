#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mdagid/functional.hpp"
#include "mdagid/kernel.hpp"
#include "mdagid/mdag.hpp"

namespace mdagid {

struct SearchBudget {
  // Negative means 2K+2 for K indicators.
  int max_depth = -1;
  std::size_t max_states = 50000;
};

enum class StepKind { FixIndicator, FixProxy, Marginalize, ConsistencySwap };
std::string_view to_string(StepKind k);

struct ReductionStep {
  StepKind kind;
  // Indicators fixed together, the proxy name, the marginalized vertices or
  // the swapped base.
  std::vector<VertexId> vertices;
  friend bool operator==(const ReductionStep&, const ReductionStep&) = default;
};

struct SearchDiagnostics {
  std::size_t states_explored = 0;
  int depth_reached = 0;
  std::size_t frontier_peak = 0;
  bool budget_exhausted = false;
  std::vector<std::string> notes;
  friend bool operator==(const SearchDiagnostics&, const SearchDiagnostics&) = default;
};

enum class PropensityRoute { Immediate, Search, OddsRatio, None };
std::string_view to_string(PropensityRoute r);

struct PropensityResult {
  VertexId indicator;
  bool identified = false;
  PropensityRoute route = PropensityRoute::None;
  // p(R_k=1 | conditioning) with every indicator at 1.
  std::optional<Expr> functional;
  // Same conditional with R_k left free.
  std::optional<Expr> conditional;
  std::vector<VertexId> conditioning;
  std::vector<ReductionStep> steps;
  std::vector<VertexId> marginalized;
  VertexId partner;
  SearchDiagnostics diagnostics;

  std::string partial_order() const;
  friend bool operator==(const PropensityResult&, const PropensityResult&) = default;
};

enum class QueryKind { TargetLaw, FullLaw, CounterfactualOutcome };
enum class Verdict { Identified, ProvablyNotIdentified, NotIdentifiedByProcedure };
std::string_view to_string(QueryKind q);
std::string_view to_string(Verdict v);

struct CounterfactualQuery {
  std::string treatment;
  std::string outcome;
  friend bool operator==(const CounterfactualQuery&, const CounterfactualQuery&) = default;
};

struct NamedExpr {
  std::string name;
  Expr expr;
  friend bool operator==(const NamedExpr&, const NamedExpr&) = default;
};

struct IdResult {
  QueryKind query = QueryKind::TargetLaw;
  std::string model;
  Verdict verdict = Verdict::NotIdentifiedByProcedure;
  std::optional<Expr> functional;
  std::vector<StructureWitness> witnesses;
  std::vector<PropensityResult> propensities;
  // Identified building blocks when no single functional is emitted.
  std::vector<NamedExpr> pieces;
  std::optional<CounterfactualQuery> counterfactual;
  std::vector<std::string> notes;

  bool identified() const { return verdict == Verdict::Identified; }
  friend bool operator==(const IdResult&, const IdResult&) = default;
};

PropensityResult identify_propensity(const MDag& m, const VertexId& r_k, const SearchBudget& budget = {},
                                     bool allow_odds_ratio = true);

// `order` permutes the indicators processed; empty means lexicographic.
IdResult identify_target_law(const MDag& m, const SearchBudget& budget = {}, const std::vector<VertexId>& order = {});
IdResult identify_full_law(const MDag& m);

// p(r_i, r_j | ctx) rebuilt from two conditionals at the reference value 1
// and the odds ratio. ctx maps vertices to a pinned value or nullopt (free).
Expr odds_ratio_parameterize(const MDag& m, const std::pair<VertexId, VertexId>& pair,
                             const std::map<VertexId, std::optional<int>>& ctx);

// Full law p(l(1), w, r) through the log-linear odds terms with reference
// pattern R=1; valid when the full law is identified. Any K.
Expr full_law_functional(const MDag& m, std::vector<NamedExpr>* odds_terms = nullptr);

IdResult identify_counterfactual_outcome(const MDag& m, const CounterfactualQuery& query);

struct SequentialTrace {
  std::vector<std::string> events;
  bool completed = false;
  bool blocked = false;
  VertexId blocked_vertex;
};

// Fixes indicators one at a time in the given order, reading each
// propensity off the current kernel, and reports where that breaks down.
SequentialTrace trace_sequential(const MDag& m, const std::vector<VertexId>& order);

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const IdResult& r);
IdResult id_result_from_json(const nlohmann::json& j);
std::string format_text(const IdResult& r);

}  // namespace mdagid
