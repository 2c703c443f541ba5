#include "mdagid/id_engine.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mdagid/errors.hpp"

namespace mdagid {

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::FixIndicator:
      return "FixIndicator";
    case StepKind::FixProxy:
      return "FixProxy";
    case StepKind::Marginalize:
      return "Marginalize";
    case StepKind::ConsistencySwap:
      return "ConsistencySwap";
  }
  return "?";
}

std::string_view to_string(PropensityRoute r) {
  switch (r) {
    case PropensityRoute::Immediate:
      return "immediate";
    case PropensityRoute::Search:
      return "search";
    case PropensityRoute::OddsRatio:
      return "odds_ratio";
    case PropensityRoute::None:
      return "none";
  }
  return "?";
}

std::string_view to_string(QueryKind q) {
  switch (q) {
    case QueryKind::TargetLaw:
      return "target";
    case QueryKind::FullLaw:
      return "full";
    case QueryKind::CounterfactualOutcome:
      return "counterfactual_outcome";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Identified:
      return "Identified";
    case Verdict::ProvablyNotIdentified:
      return "ProvablyNotIdentified";
    case Verdict::NotIdentifiedByProcedure:
      return "NotIdentifiedByProcedure";
  }
  return "?";
}

std::string PropensityResult::partial_order() const {
  if (!identified) return "";
  if (route == PropensityRoute::OddsRatio) return "odds ratio with " + partner;
  std::vector<std::string> items;
  for (const auto& s : steps) {
    if (s.kind == StepKind::FixIndicator) {
      std::vector<std::string> names;
      for (const auto& v : s.vertices) names.push_back("I_" + v);
      if (names.size() == 1) {
        items.push_back(names[0]);
      } else {
        std::string g = "{";
        for (std::size_t i = 0; i < names.size(); ++i) g += (i ? ", " : "") + names[i];
        items.push_back(g + "}");
      }
    } else if (s.kind == StepKind::FixProxy) {
      items.push_back("I_" + s.vertices[0]);
    }
  }
  items.push_back("I_" + indicator);
  std::string out = "{ ";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " < " : "") + items[i];
  out += " }";
  if (!marginalized.empty()) {
    out += " in G(V \\ {";
    for (std::size_t i = 0; i < marginalized.size(); ++i) out += (i ? ", " : "") + marginalized[i];
    out += "})";
  }
  return out;
}

namespace {

Kernel base_kernel(const MDag& m) {
  Kernel k = Kernel::from_mdag(m);
  VertexSet hidden(m.hidden().begin(), m.hidden().end());
  return k.marginalize(hidden);
}

Expr pin_indicators(const MDag& m, const Expr& e, const VertexId& keep_free = {}) {
  Assignment at;
  for (const auto& v : e.free_variables())
    if (v != keep_free && m.has_role(v, VertexRole::Indicator)) at[v] = 1;
  return normalize(substitute(e, at));
}

std::vector<ReductionStep> swap_steps(const MDag& m, const VertexSet& swapped) {
  std::vector<ReductionStep> out;
  for (const auto& r : swapped) out.push_back({StepKind::ConsistencySwap, {*m.base_of(r)}});
  return out;
}

// Subsets of {0..n-1} ordered by size, then lexicographically.
std::vector<std::vector<int>> ordered_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= n; ++size) {
    std::vector<int> idx(size);
    std::function<void(int, int)> rec = [&](int pos, int start) {
      if (pos == size) {
        out.push_back(idx);
        return;
      }
      for (int i = start; i < n; ++i) {
        idx[pos] = i;
        rec(pos + 1, i + 1);
      }
    };
    rec(0, 0);
  }
  return out;
}

struct SearchNode {
  Kernel kernel;
  std::vector<ReductionStep> steps;
  int depth;
};

class PropensitySearch {
 public:
  PropensitySearch(const MDag& m, const VertexId& r, const SearchBudget& budget)
      : m_(m), r_(r), budget_(budget) {}

  std::optional<std::pair<SearchNode, IdentifiedConditional>> run(const Kernel& start, SearchDiagnostics& diag) {
    int max_depth = budget_.max_depth >= 0 ? budget_.max_depth : 2 * static_cast<int>(m_.num_missing()) + 2;
    base_parents_ = start.graph().parents(r_);
    std::deque<SearchNode> queue;
    std::unordered_set<std::string> visited{start.state_key()};
    queue.push_back({start, {}, 0});
    while (!queue.empty()) {
      diag.frontier_peak = std::max(diag.frontier_peak, queue.size());
      SearchNode node = std::move(queue.front());
      queue.pop_front();
      if (node.depth >= max_depth) continue;
      for (auto& [kernel, steps] : successors(node.kernel)) {
        auto key = kernel.state_key();
        if (!visited.insert(key).second) continue;
        ++diag.states_explored;
        diag.depth_reached = std::max(diag.depth_reached, node.depth + 1);
        std::vector<ReductionStep> path = node.steps;
        path.insert(path.end(), steps.begin(), steps.end());
        if (auto c = extract(kernel)) return std::make_pair(SearchNode{kernel, path, node.depth + 1}, *c);
        if (diag.states_explored >= budget_.max_states) {
          diag.budget_exhausted = true;
          diag.notes.push_back("state budget of " + std::to_string(budget_.max_states) + " exhausted");
          return std::nullopt;
        }
        queue.push_back({std::move(kernel), std::move(path), node.depth + 1});
      }
    }
    if (diag.depth_reached >= max_depth) diag.notes.push_back("depth budget of " + std::to_string(max_depth) + " reached");
    return std::nullopt;
  }

  std::optional<IdentifiedConditional> extract(const Kernel& k) const {
    const auto& g = k.graph();
    if (!g.contains(r_) || !g.siblings(r_).empty()) return std::nullopt;
    VertexSet expected;
    for (const auto& p : base_parents_) {
      if (m_.has_role(p, VertexRole::Proxy) && !g.contains(p)) {
        auto cf = MDag::counterfactual_of(*m_.base_of(p));
        if (!g.contains(cf)) return std::nullopt;
        expected.insert(cf);
      } else {
        expected.insert(p);
      }
    }
    if (g.parents(r_) != expected) return std::nullopt;
    return k.identify_conditional(r_, expected, true);
  }

 private:
  using Successor = std::pair<Kernel, std::vector<ReductionStep>>;

  std::vector<Successor> successors(const Kernel& k) const {
    std::vector<Successor> out;
    const auto& g = k.graph();

    std::vector<IdentifiedConditional> fixable;
    for (const auto& rj : m_.indicators()) {
      if (rj == r_ || !k.is_random(rj) || k.is_selected(rj)) continue;
      auto c = k.identify_conditional(rj, g.parents(rj), true);
      if (c && !c->swapped.count(r_)) fixable.push_back(*c);
    }
    for (const auto& subset : ordered_subsets(static_cast<int>(fixable.size()))) {
      std::vector<IdentifiedConditional> group;
      VertexSet swapped;
      std::vector<VertexId> names;
      for (int i : subset) {
        group.push_back(fixable[i]);
        swapped.insert(fixable[i].swapped.begin(), fixable[i].swapped.end());
        names.push_back(fixable[i].vertex);
      }
      auto steps = swap_steps(m_, swapped);
      steps.push_back({StepKind::FixIndicator, names});
      out.emplace_back(k.fix_indicators(group), std::move(steps));
    }

    for (const auto& base : m_.missing()) {
      auto cf = MDag::counterfactual_of(base);
      auto ind = MDag::indicator_of(base);
      auto f = k.fixed().find(ind);
      if (f == k.fixed().end() || f->second != 1 || !k.is_random(cf)) continue;
      auto c = k.identify_conditional(cf, g.parents(cf), true);
      if (!c || c->swapped.count(r_)) continue;
      auto steps = swap_steps(m_, c->swapped);
      steps.push_back({StepKind::FixProxy, {MDag::proxy_of(base)}});
      out.emplace_back(k.fix_counterfactual(*c), std::move(steps));
    }

    const VertexSet pa = g.parents(r_);
    auto usable = [&](const VertexId& v) {
      return k.is_random(v) && !k.is_selected(v) && !pa.count(v);
    };
    std::vector<VertexSet> units;
    for (const auto& base : m_.missing()) {
      VertexSet unit;
      bool ok = true;
      for (const auto& v : {MDag::counterfactual_of(base), MDag::proxy_of(base)}) {
        if (!g.contains(v)) continue;
        if (!usable(v)) ok = false;
        unit.insert(v);
      }
      if (ok && !unit.empty()) units.push_back(unit);
    }
    for (const auto& w : m_.observed())
      if (g.contains(w) && usable(w)) units.push_back({w});
    for (const auto& subset : ordered_subsets(static_cast<int>(units.size()))) {
      VertexSet s;
      for (int i : subset) s.insert(units[i].begin(), units[i].end());
      Kernel next = k.marginalize(s);
      out.emplace_back(std::move(next), std::vector<ReductionStep>{{StepKind::Marginalize, {s.begin(), s.end()}}});
    }
    return out;
  }

  const MDag& m_;
  VertexId r_;
  SearchBudget budget_;
  VertexSet base_parents_;
};

void finish(const MDag& m, PropensityResult& res, const Expr& conditional) {
  res.identified = true;
  res.conditional = pin_indicators(m, conditional, res.indicator);
  res.functional = pin_indicators(m, substitute(*res.conditional, {{res.indicator, 1}}));
}

// Conditional p(head | given) of the full law, when readable from the
// observed law by a swap (route 1) or from head's propensity (route 2).
std::optional<Expr> conditional_piece(const MDag& m, const Kernel& k0, const VertexId& head,
                                      const std::map<VertexId, std::optional<int>>& given) {
  VertexSet keys;
  Assignment pins;
  for (const auto& [v, x] : given) {
    keys.insert(v);
    if (!x) continue;
    auto var = k0.variable_of(v);
    pins[var ? *var : v] = *x;
  }
  if (auto c = k0.identify_conditional(head, keys, false)) {
    bool ok = true;
    for (const auto& r : c->swapped) {
      auto it = given.find(r);
      if (it != given.end() && it->second != 1) ok = false;
    }
    if (ok) return normalize(substitute(c->conditional, pins));
  }
  const auto& g = k0.graph();
  if (!g.siblings(head).empty()) return std::nullopt;
  VertexSet pa = g.parents(head);
  for (const auto& p : pa)
    if (!keys.count(p)) return std::nullopt;
  for (const auto& [v, x] : given)
    if (m.has_role(v, VertexRole::Indicator) && x != 1) return std::nullopt;
  VertexSet rest;
  for (const auto& v : keys)
    if (!pa.count(v)) rest.insert(v);
  if (!rest.empty() && !d_separated(g, {head}, rest, pa)) return std::nullopt;
  auto p = identify_propensity(m, head, {}, false);
  if (!p.identified) return std::nullopt;
  return normalize(substitute(*p.conditional, pins));
}

std::optional<Expr> odds_ratio_joint(const MDag& m, const Kernel& k0, const VertexId& ri, const VertexId& rj,
                                     const std::map<VertexId, std::optional<int>>& ctx) {
  auto with = [&](const VertexId& v, std::optional<int> x) {
    auto c = ctx;
    c[v] = x;
    return c;
  };
  auto a = conditional_piece(m, k0, ri, with(rj, 1));
  auto b = conditional_piece(m, k0, rj, with(ri, 1));
  if (!a || !b) return std::nullopt;
  std::optional<Expr> odds;
  for (const auto& [h, o] : {std::pair{rj, ri}, std::pair{ri, rj}}) {
    auto d = conditional_piece(m, k0, h, with(o, std::nullopt));
    if (!d) continue;
    Expr d_h1 = substitute(*d, {{h, 1}});
    Expr d_o1 = substitute(*d, {{o, 1}});
    Expr d_11 = substitute(*d, {{h, 1}, {o, 1}});
    odds = Expr::ratio(Expr::product({*d, d_11}), Expr::product({d_h1, d_o1}));
    break;
  }
  if (!odds) return std::nullopt;
  Expr u = Expr::product({*a, *b, *odds});
  return normalize(Expr::ratio(u, Expr::sum({ri, rj}, u)));
}

std::vector<std::string> observed_variables(const MDag& m) {
  std::vector<std::string> out;
  for (const auto& v : m.observed_law_vertices())
    out.push_back(m.has_role(v, VertexRole::Proxy) ? *m.base_of(v) : v);
  return out;
}

Expr complete_case_atom(const MDag& m) {
  Assignment ones;
  for (const auto& r : m.indicators()) ones[r] = 1;
  return Expr::atom(observed_variables(m), {}, ones);
}

}  // namespace

PropensityResult identify_propensity(const MDag& m, const VertexId& r_k, const SearchBudget& budget,
                                     bool allow_odds_ratio) {
  if (!m.has_role(r_k, VertexRole::Indicator)) throw ArgumentError(r_k + " is not a missingness indicator");
  PropensityResult res;
  res.indicator = r_k;
  Kernel k0 = base_kernel(m);
  const Digraph& g0 = k0.graph();
  bool trivial = g0.siblings(r_k).empty();
  VertexSet cond = trivial ? g0.parents(r_k) : markov_pillow(g0, r_k, layered_order(m, g0));
  res.conditioning.assign(cond.begin(), cond.end());

  if (auto c = k0.identify_conditional(r_k, cond, false)) {
    res.route = PropensityRoute::Immediate;
    res.steps = swap_steps(m, c->swapped);
    finish(m, res, c->conditional);
    return res;
  }
  if (!trivial) {
    res.diagnostics.notes.push_back("search is restricted to indicators without bidirected edges; only the Markov pillow check applies");
  } else {
    PropensitySearch search(m, r_k, budget);
    if (auto found = search.run(k0, res.diagnostics)) {
      auto& [node, c] = *found;
      res.route = PropensityRoute::Search;
      res.steps = node.steps;
      auto tail = swap_steps(m, c.swapped);
      res.steps.insert(res.steps.end(), tail.begin(), tail.end());
      VertexSet marg;
      for (const auto& s : node.steps)
        if (s.kind == StepKind::Marginalize) marg.insert(s.vertices.begin(), s.vertices.end());
      res.marginalized.assign(marg.begin(), marg.end());
      finish(m, res, c.conditional);
      return res;
    }
  }

  if (allow_odds_ratio && trivial && m.num_missing() <= 3) {
    VertexSet pa_k = g0.parents(r_k);
    for (const auto& rj : m.indicators()) {
      if (rj == r_k || !g0.has_edge(r_k, rj) || !g0.siblings(rj).empty()) continue;
      VertexSet ctx_set = pa_k;
      for (const auto& p : g0.parents(rj)) ctx_set.insert(p);
      ctx_set.erase(r_k);
      ctx_set.erase(rj);
      VertexSet extra;
      for (const auto& v : ctx_set)
        if (!pa_k.count(v)) extra.insert(v);
      if (!extra.empty() && !d_separated(g0, {r_k}, extra, pa_k)) continue;
      std::map<VertexId, std::optional<int>> ctx;
      for (const auto& v : ctx_set)
        ctx[v] = m.has_role(v, VertexRole::Indicator) ? std::optional<int>(1) : std::nullopt;
      auto joint = odds_ratio_joint(m, k0, r_k, rj, ctx);
      if (!joint) continue;
      res.route = PropensityRoute::OddsRatio;
      res.partner = rj;
      res.diagnostics.notes.push_back("propensity obtained by summing the odds-ratio joint of " + r_k + " and " + rj);
      finish(m, res, Expr::sum({rj}, *joint));
      return res;
    }
  }
  res.diagnostics.notes.push_back("no reduction sequence within budget identifies " + r_k);
  return res;
}

Expr odds_ratio_parameterize(const MDag& m, const std::pair<VertexId, VertexId>& pair,
                             const std::map<VertexId, std::optional<int>>& ctx) {
  for (const auto& v : {pair.first, pair.second})
    if (!m.has_role(v, VertexRole::Indicator)) throw ArgumentError(v + " is not a missingness indicator");
  if (m.num_missing() > 3) throw ArgumentError("odds-ratio construction is limited to at most three indicators");
  for (const auto& [v, x] : ctx) m.role(v);
  Kernel k0 = base_kernel(m);
  auto joint = odds_ratio_joint(m, k0, pair.first, pair.second, ctx);
  if (!joint) throw NotCompilable("a conditional needed by the odds-ratio construction is not identified");
  return *joint;
}

Expr full_law_functional(const MDag& m, std::vector<NamedExpr>* odds_terms) {
  const auto inds = m.indicators();
  const int k = static_cast<int>(inds.size());
  const Expr complete = complete_case_atom(m);
  std::vector<std::optional<Expr>> e(static_cast<std::size_t>(1) << k);
  std::vector<int> masks;
  for (int mask = 1; mask < (1 << k); ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(),
                   [](int a, int b) { return __builtin_popcount(a) < __builtin_popcount(b); });
  for (int mask : masks) {
    std::vector<std::string> head;
    Assignment pins;
    std::vector<std::string> summed;
    for (int i = 0; i < k; ++i) {
      auto base = *m.base_of(inds[i]);
      bool zero = mask & (1 << i);
      head.push_back(inds[i]);
      pins[inds[i]] = zero ? 0 : 1;
      if (zero) summed.push_back(base);
      else head.push_back(base);
    }
    for (const auto& w : m.observed()) head.push_back(w);
    std::vector<Expr> inner{complete};
    for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) inner.push_back(*e[sub]);
    e[mask] = Expr::ratio(Expr::atom(head, {}, pins), Expr::sum(summed, Expr::product(inner)));
    if (odds_terms) {
      std::string name = "odds{";
      bool first = true;
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) {
          name += (first ? "" : ",") + inds[i];
          first = false;
        }
      odds_terms->push_back({name + "}", *e[mask]});
    }
  }
  std::vector<Expr> factors{complete};
  for (int mask : masks) {
    Assignment when;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) when[inds[i]] = 0;
    factors.push_back(Expr::select(when, *e[mask], Expr::constant(1.0)));
  }
  return Expr::product(factors);
}

namespace {

std::vector<StructureWitness> full_law_witnesses(const MDag& m) {
  if (m.hidden().empty()) {
    auto out = detect_self_censoring(m);
    auto col = detect_colluders(m);
    out.insert(out.end(), col.begin(), col.end());
    return out;
  }
  return detect_colluding_paths(m);
}

// Replaces each proxy parent L_j -> R_k by L_j(1) -> R_k and R_j -> R_k.
MDag resolve_proxy_children(const MDag& m) {
  MDagSpec spec;
  spec.name = m.name();
  spec.missing = m.missing();
  spec.observed = m.observed();
  spec.hidden = m.hidden();
  for (const auto& n : m.missing()) spec.cardinalities[n] = m.base_cardinality(n);
  for (const auto& n : m.observed()) spec.cardinalities[n] = m.base_cardinality(n);
  for (const auto& n : m.hidden()) spec.cardinalities[n] = m.base_cardinality(n);
  std::set<Edge> edges;
  for (const auto& [a, b] : m.probabilistic_edges()) {
    if (m.has_role(a, VertexRole::Proxy)) {
      auto base = *m.base_of(a);
      edges.emplace(MDag::counterfactual_of(base), b);
      edges.emplace(MDag::indicator_of(base), b);
    } else {
      edges.emplace(a, b);
    }
  }
  spec.edges.assign(edges.begin(), edges.end());
  return build_mdag(spec);
}

}  // namespace

IdResult identify_full_law(const MDag& m) {
  IdResult res;
  res.query = QueryKind::FullLaw;
  res.model = m.name();
  res.witnesses = full_law_witnesses(m);
  if (!res.witnesses.empty()) {
    res.verdict = Verdict::ProvablyNotIdentified;
    return res;
  }
  if (m.proxies_have_children()) {
    MDag resolved = resolve_proxy_children(m);
    if (!full_law_witnesses(resolved).empty()) {
      res.verdict = Verdict::NotIdentifiedByProcedure;
      res.notes.push_back("proxies have children: the criterion is only known to be sufficient here, and it fails once "
                          "proxy parents are replaced by their counterfactual and indicator");
      return res;
    }
    res.notes.push_back("proxies have children: identified through the sufficient direction of the criterion");
  }
  res.verdict = Verdict::Identified;
  std::vector<NamedExpr> terms;
  Expr full = full_law_functional(m, &terms);
  if (m.num_missing() <= 3) {
    res.functional = normalize(full);
  } else {
    for (auto& t : terms)
      if (std::count(t.name.begin(), t.name.end(), ',') == 0) res.pieces.push_back({t.name, normalize(t.expr)});
    res.notes.push_back("explicit full-law functional is emitted for at most three indicators; main odds terms listed");
  }
  return res;
}

IdResult identify_target_law(const MDag& m, const SearchBudget& budget, const std::vector<VertexId>& order) {
  IdResult res;
  res.query = QueryKind::TargetLaw;
  res.model = m.name();
  auto sc = detect_self_censoring(m);
  auto cc = detect_criss_cross(m);
  res.witnesses = sc;
  res.witnesses.insert(res.witnesses.end(), cc.begin(), cc.end());
  if (!m.hidden().empty()) {
    for (const auto& w : detect_colluding_paths(m)) {
      if (w.vertices.size() == 2) continue;
      auto colliders = path_colliders(m, w);
      bool observed_only = std::all_of(colliders.begin(), colliders.end(),
                                       [&](const VertexId& v) { return m.has_role(v, VertexRole::Observed); });
      if (observed_only) res.witnesses.push_back(w);
    }
  }
  if (!res.witnesses.empty()) {
    res.verdict = Verdict::ProvablyNotIdentified;
    return res;
  }

  std::vector<VertexId> inds = order.empty() ? m.indicators() : order;
  {
    auto a = inds;
    auto b = m.indicators();
    std::sort(a.begin(), a.end());
    if (a != b) throw ArgumentError("indicator order must be a permutation of the model's indicators");
  }
  bool all = true;
  std::vector<Expr> props;
  for (const auto& r : inds) {
    res.propensities.push_back(identify_propensity(m, r, budget));
    if (res.propensities.back().identified) props.push_back(*res.propensities.back().functional);
    else all = false;
  }
  if (all) {
    res.verdict = Verdict::Identified;
    res.functional = normalize(Expr::ratio(complete_case_atom(m), Expr::product(props)));
    return res;
  }
  IdResult full = identify_full_law(m);
  if (full.identified()) {
    std::vector<std::string> rs = m.indicators();
    res.verdict = Verdict::Identified;
    res.functional = normalize(Expr::sum(rs, full_law_functional(m)));
    res.notes.push_back("target law obtained by summing the identified full law over missingness patterns");
    return res;
  }
  res.verdict = Verdict::NotIdentifiedByProcedure;
  for (const auto& p : res.propensities)
    if (!p.identified) res.notes.push_back("propensity of " + p.indicator + " unresolved");
  return res;
}

IdResult identify_counterfactual_outcome(const MDag& m, const CounterfactualQuery& q) {
  if (m.missing().size() != 1 || m.missing()[0] != q.outcome)
    throw UnsupportedQuery("the outcome template needs exactly one missing variable, the outcome " + q.outcome);
  if (!m.has_role(q.treatment, VertexRole::Observed))
    throw UnsupportedQuery("treatment " + q.treatment + " must be a fully observed variable");
  if (m.proxies_have_children()) throw UnsupportedQuery("the outcome template requires a childless proxy");
  IdResult res;
  res.query = QueryKind::CounterfactualOutcome;
  res.model = m.name();
  res.counterfactual = q;

  const auto& g = m.graph();
  const VertexId fixed = "do(" + q.treatment + ")";
  std::vector<VertexId> names = g.vertices();
  names.push_back(fixed);
  std::vector<Edge> edges;
  for (const auto& [a, b] : g.directed_edges()) {
    if (a == q.treatment) edges.emplace_back(fixed, b);
    else edges.emplace_back(a, b);
  }
  Digraph swig(names, edges);
  const auto y1 = MDag::counterfactual_of(q.outcome);
  const auto ry = MDag::indicator_of(q.outcome);
  VertexSet covariates;
  for (const auto& w : m.observed())
    if (w != q.treatment) covariates.insert(w);
  VertexSet z2 = covariates;
  z2.insert(ry);
  z2.insert(fixed);
  bool c1 = d_separated(swig, {y1}, {ry}, {fixed});
  bool c2 = d_separated(swig, {y1}, {q.treatment}, z2);
  if (!c1 || !c2) {
    res.verdict = Verdict::NotIdentifiedByProcedure;
    if (!c1) res.notes.push_back(y1 + " is not independent of " + ry + " after intervening on " + q.treatment);
    if (!c2) res.notes.push_back(y1 + " is not independent of " + q.treatment + " given covariates and " + ry);
    return res;
  }
  std::vector<std::string> xs(covariates.begin(), covariates.end());
  std::vector<std::string> given = xs;
  given.push_back(q.treatment);
  given.push_back(ry);
  std::vector<Expr> factors{Expr::atom({q.outcome}, given, {{ry, 1}})};
  if (!xs.empty()) factors.push_back(Expr::atom(xs, {ry}, {{ry, 1}}));
  res.verdict = Verdict::Identified;
  res.functional = normalize(Expr::sum(xs, Expr::product(factors)));
  return res;
}

SequentialTrace trace_sequential(const MDag& m, const std::vector<VertexId>& order) {
  SequentialTrace trace;
  Kernel k = base_kernel(m);
  for (const auto& r : order) {
    if (!m.has_role(r, VertexRole::Indicator)) throw ArgumentError(r + " is not a missingness indicator");
    if (k.is_selected(r)) {
      trace.events.push_back("propensity of " + r + " by Bayes rule needs the sum over " + r);
      try {
        k.marginalize({r});
      } catch (const SelectionBlocked& err) {
        trace.events.push_back(std::string("SelectionBlocked: ") + err.what());
        trace.blocked = true;
        trace.blocked_vertex = err.vertex();
        return trace;
      }
    }
    auto c = k.identify_conditional(r, k.graph().parents(r), false);
    if (!c) {
      trace.events.push_back("propensity of " + r + " cannot be read from the current kernel");
      return trace;
    }
    Expr prop = pin_indicators(m, c->conditional, r);
    k = k.fix(r, 1, prop);
    std::string sel;
    for (const auto& [v, x] : k.selection()) sel += (sel.empty() ? "" : ", ") + v + "=" + std::to_string(x);
    trace.events.push_back("fix " + r + "=1 dividing by " + normalize(substitute(prop, {{r, 1}})).text() +
                           "; selection {" + sel + "}");
  }
  trace.completed = true;
  return trace;
}

namespace {

using nlohmann::json;

json opt_expr(const std::optional<Expr>& e) { return e ? to_json(*e) : json(nullptr); }

std::optional<Expr> opt_expr_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return expr_from_json(j);
}

template <typename Enum, typename Values>
Enum enum_from(const std::string& s, const Values& values) {
  for (auto v : values)
    if (to_string(v) == s) return v;
  throw ArgumentError("unknown enumeration value '" + s + "'");
}

}  // namespace

json to_json(const IdResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["query"] = std::string(to_string(r.query));
  j["model"] = r.model;
  j["verdict"] = std::string(to_string(r.verdict));
  j["functional"] = opt_expr(r.functional);
  j["functional_text"] = r.functional ? json(r.functional->text()) : json(nullptr);
  json ws = json::array();
  for (const auto& w : r.witnesses) {
    json edges = json::array();
    for (const auto& [a, b] : w.edges) edges.push_back({a, b});
    ws.push_back({{"kind", std::string(to_string(w.kind))}, {"vertices", w.vertices}, {"edges", edges}});
  }
  j["witnesses"] = ws;
  json ps = json::array();
  for (const auto& p : r.propensities) {
    json steps = json::array();
    for (const auto& s : p.steps) steps.push_back({{"kind", std::string(to_string(s.kind))}, {"vertices", s.vertices}});
    ps.push_back({{"indicator", p.indicator},
                  {"identified", p.identified},
                  {"route", std::string(to_string(p.route))},
                  {"functional", opt_expr(p.functional)},
                  {"functional_text", p.functional ? json(p.functional->text()) : json(nullptr)},
                  {"conditional", opt_expr(p.conditional)},
                  {"conditioning", p.conditioning},
                  {"steps", steps},
                  {"marginalized", p.marginalized},
                  {"partner", p.partner},
                  {"partial_order", p.partial_order()},
                  {"diagnostics",
                   {{"states_explored", p.diagnostics.states_explored},
                    {"depth_reached", p.diagnostics.depth_reached},
                    {"frontier_peak", p.diagnostics.frontier_peak},
                    {"budget_exhausted", p.diagnostics.budget_exhausted},
                    {"notes", p.diagnostics.notes}}}});
  }
  j["propensities"] = ps;
  json pieces = json::array();
  for (const auto& p : r.pieces) pieces.push_back({{"name", p.name}, {"functional", to_json(p.expr)}});
  j["pieces"] = pieces;
  j["counterfactual"] = r.counterfactual ? json{{"treatment", r.counterfactual->treatment},
                                                {"outcome", r.counterfactual->outcome}}
                                         : json(nullptr);
  j["notes"] = r.notes;
  return j;
}

IdResult id_result_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw ArgumentError("unsupported schema_version");
    IdResult r;
    r.query = enum_from<QueryKind>(j.at("query").get<std::string>(),
                                   std::array{QueryKind::TargetLaw, QueryKind::FullLaw, QueryKind::CounterfactualOutcome});
    r.model = j.at("model").get<std::string>();
    r.verdict = enum_from<Verdict>(j.at("verdict").get<std::string>(),
                                   std::array{Verdict::Identified, Verdict::ProvablyNotIdentified,
                                              Verdict::NotIdentifiedByProcedure});
    r.functional = opt_expr_from(j.at("functional"));
    for (const auto& w : j.at("witnesses")) {
      StructureWitness sw{witness_kind_from_string(w.at("kind").get<std::string>()),
                          w.at("vertices").get<std::vector<VertexId>>(),
                          {}};
      for (const auto& e : w.at("edges")) sw.edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
      r.witnesses.push_back(std::move(sw));
    }
    for (const auto& p : j.at("propensities")) {
      PropensityResult pr;
      pr.indicator = p.at("indicator").get<std::string>();
      pr.identified = p.at("identified").get<bool>();
      pr.route = enum_from<PropensityRoute>(p.at("route").get<std::string>(),
                                            std::array{PropensityRoute::Immediate, PropensityRoute::Search,
                                                       PropensityRoute::OddsRatio, PropensityRoute::None});
      pr.functional = opt_expr_from(p.at("functional"));
      pr.conditional = opt_expr_from(p.at("conditional"));
      pr.conditioning = p.at("conditioning").get<std::vector<VertexId>>();
      for (const auto& s : p.at("steps"))
        pr.steps.push_back({enum_from<StepKind>(s.at("kind").get<std::string>(),
                                                std::array{StepKind::FixIndicator, StepKind::FixProxy,
                                                           StepKind::Marginalize, StepKind::ConsistencySwap}),
                            s.at("vertices").get<std::vector<VertexId>>()});
      pr.marginalized = p.at("marginalized").get<std::vector<VertexId>>();
      pr.partner = p.at("partner").get<std::string>();
      const auto& d = p.at("diagnostics");
      pr.diagnostics.states_explored = d.at("states_explored").get<std::size_t>();
      pr.diagnostics.depth_reached = d.at("depth_reached").get<int>();
      pr.diagnostics.frontier_peak = d.at("frontier_peak").get<std::size_t>();
      pr.diagnostics.budget_exhausted = d.at("budget_exhausted").get<bool>();
      pr.diagnostics.notes = d.at("notes").get<std::vector<std::string>>();
      r.propensities.push_back(std::move(pr));
    }
    for (const auto& p : j.at("pieces")) r.pieces.push_back({p.at("name").get<std::string>(), expr_from_json(p.at("functional"))});
    if (!j.at("counterfactual").is_null())
      r.counterfactual = CounterfactualQuery{j.at("counterfactual").at("treatment").get<std::string>(),
                                             j.at("counterfactual").at("outcome").get<std::string>()};
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& err) {
    throw ArgumentError(std::string("malformed result JSON: ") + err.what());
  }
}

std::string format_text(const IdResult& r) {
  std::ostringstream out;
  out << "model: " << r.model << "\n";
  out << "query: " << to_string(r.query);
  if (r.counterfactual) out << " (" << r.counterfactual->outcome << "(1) under " << r.counterfactual->treatment << "=a)";
  out << "\n";
  out << "verdict: " << to_string(r.verdict) << "\n";
  if (r.functional) out << "functional: " << r.functional->text() << "\n";
  if (!r.witnesses.empty()) {
    out << "witnesses:\n";
    for (const auto& w : r.witnesses) out << "  " << w.describe() << "\n";
  }
  if (!r.propensities.empty()) {
    out << "propensities:\n";
    for (const auto& p : r.propensities) {
      out << "  " << p.indicator << ": ";
      if (p.identified) {
        out << "identified (" << to_string(p.route) << ") " << p.partial_order() << "\n";
        out << "    " << p.functional->text() << "\n";
      } else {
        out << "unresolved after " << p.diagnostics.states_explored << " states, depth "
            << p.diagnostics.depth_reached << "\n";
      }
      for (const auto& n : p.diagnostics.notes) out << "    note: " << n << "\n";
    }
  }
  for (const auto& p : r.pieces) out << "piece " << p.name << ": " << p.expr.text() << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  return out.str();
}

}  // namespace mdagid
