#include "mdagid/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "mdagid/errors.hpp"

namespace mdagid {

std::string_view to_string(FactorProvenance p) {
  switch (p) {
    case FactorProvenance::Original:
      return "original";
    case FactorProvenance::Pseudo:
      return "pseudo";
    case FactorProvenance::Deterministic:
      return "deterministic";
  }
  return "?";
}

Kernel Kernel::from_mdag(const MDag& m) {
  Kernel k;
  k.model_ = std::make_shared<const MDag>(m);
  k.graph_ = m.graph();
  std::vector<std::string> vars;
  for (const auto& v : m.observed_law_vertices()) vars.push_back(*k.variable_of(v));
  k.expr_ = Expr::atom(vars);
  return k;
}

bool Kernel::is_random(const VertexId& v) const {
  return graph_.contains(v) && !fixed_.count(v) && !context_.count(v);
}

std::optional<std::string> Kernel::variable_of(const VertexId& v) const {
  const MDag& m = *model_;
  switch (m.role(v)) {
    case VertexRole::Indicator:
    case VertexRole::Observed:
      return v;
    case VertexRole::Hidden:
      return std::nullopt;
    case VertexRole::Proxy:
      return *m.base_of(v);
    case VertexRole::Counterfactual: {
      auto base = *m.base_of(v);
      auto r = MDag::indicator_of(base);
      auto is_one = [&](const auto& table) {
        auto it = table.find(r);
        return it != table.end() && it->second == 1;
      };
      auto f = fixed_.find(r);
      bool fixed_one = f != fixed_.end() && f->second == 1;
      if (fixed_one || is_one(selection_) || is_one(context_) || swapped_.count(base)) return base;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<Factor> Kernel::factors() const {
  const MDag& m = *model_;
  std::vector<Factor> out;
  for (const auto& v : graph_.vertices()) {
    if (fixed_.count(v)) continue;
    Factor f{v, graph_.parents(v), FactorProvenance::Original, {}};
    if (m.role(v) == VertexRole::Proxy) {
      f.provenance = FactorProvenance::Deterministic;
    } else {
      VertexSet original;
      for (const auto& p : m.graph().parents(v)) {
        if (m.role(p) == VertexRole::Proxy && !graph_.contains(p) && fixed_.count(MDag::indicator_of(*m.base_of(p))))
          original.insert(MDag::counterfactual_of(*m.base_of(p)));
        else
          original.insert(p);
      }
      if (original != f.tail) f.provenance = FactorProvenance::Pseudo;
    }
    if (!graph_.siblings(v).empty()) {
      f.district = district(graph_, v);
      f.provenance = FactorProvenance::Pseudo;
    }
    out.push_back(std::move(f));
  }
  return out;
}

void Kernel::drop_merged_proxy(const VertexId& indicator) {
  auto base = *model_->base_of(indicator);
  auto proxy = MDag::proxy_of(base);
  auto cf = MDag::counterfactual_of(base);
  if (!graph_.contains(proxy) || !graph_.contains(cf)) return;
  std::vector<VertexId> names;
  for (const auto& v : graph_.vertices())
    if (v != proxy) names.push_back(v);
  std::set<Edge> dir;
  for (const auto& [a, b] : graph_.directed_edges()) {
    if (b == proxy) continue;
    if (a == proxy) dir.emplace(cf, b);
    else dir.emplace(a, b);
  }
  std::set<Edge> bi;
  for (auto [a, b] : graph_.bidirected_edges()) {
    if (a == proxy) a = cf;
    if (b == proxy) b = cf;
    if (a != b) bi.emplace(std::min(a, b), std::max(a, b));
  }
  graph_ = Digraph(names, std::vector<Edge>(dir.begin(), dir.end()), std::vector<Edge>(bi.begin(), bi.end()));
}

Kernel Kernel::marginalize(const VertexSet& s) const {
  if (s.empty()) return *this;
  for (const auto& v : s) {
    if (!graph_.contains(v)) throw LookupError("vertex " + v + " is not in the kernel");
    if (selection_.count(v))
      throw SelectionBlocked(v, "cannot marginalize " + v + ": the kernel is selected on " + v + "=" +
                                    std::to_string(selection_.at(v)));
    if (fixed_.count(v)) throw ArgumentError("cannot marginalize fixed vertex " + v);
    if (context_.count(v)) throw ArgumentError("cannot marginalize evaluated vertex " + v);
  }
  Kernel k = *this;
  k.graph_ = latent_project(graph_, s);
  k.marginalized_.insert(s.begin(), s.end());
  std::set<std::string> still;
  for (const auto& v : k.graph_.vertices())
    if (auto var = k.variable_of(v)) still.insert(*var);
  std::vector<std::string> drop;
  for (const auto& v : s)
    if (auto var = variable_of(v); var && !still.count(*var) && expr_ && expr_->free_variables().count(*var))
      drop.push_back(*var);
  if (expr_) k.expr_ = Expr::sum(drop, *expr_);
  return k;
}

namespace {

void check_value(const MDag& m, const VertexId& v, int value) {
  if (value < 0 || value >= m.cardinality(v))
    throw ArgumentError("value " + std::to_string(value) + " outside the state space of " + v);
}

}  // namespace

Kernel Kernel::condition(const std::map<VertexId, int>& assignment) const {
  if (assignment.empty()) return *this;
  Assignment vals;
  for (const auto& [v, x] : assignment) {
    if (!is_random(v)) throw ArgumentError("cannot condition on non-random vertex " + v);
    check_value(*model_, v, x);
    auto var = variable_of(v);
    if (!var) throw ArgumentError("cannot condition on unobserved vertex " + v);
    vals[*var] = x;
  }
  Kernel k = *this;
  for (const auto& [v, x] : assignment) k.context_[v] = x;
  if (expr_) {
    Expr joint = substitute(*expr_, vals);
    std::set<std::string> index;
    for (const auto& [v, val] : fixed_)
      if (!val)
        if (auto var = variable_of(v)) index.insert(*var);
    k.expr_ = Expr::ratio(joint, marginal_of(joint, index));
  }
  return k;
}

Kernel Kernel::evaluate_at(const std::map<VertexId, int>& assignment) const {
  if (assignment.empty()) return *this;
  Assignment vals;
  for (const auto& [v, x] : assignment) {
    if (!graph_.contains(v)) throw LookupError("vertex " + v + " is not in the kernel");
    check_value(*model_, v, x);
    auto var = variable_of(v);
    if (!var) throw ArgumentError("cannot evaluate unobserved vertex " + v);
    vals[*var] = x;
  }
  Kernel k = *this;
  for (const auto& [v, x] : assignment) k.context_[v] = x;
  if (expr_) k.expr_ = substitute(*expr_, vals);
  return k;
}

Kernel Kernel::fix(const VertexId& v, std::optional<int> value, const std::optional<Expr>& propensity) const {
  if (!is_random(v)) throw ArgumentError("cannot fix non-random vertex " + v);
  const MDag& m = *model_;
  if (value) check_value(m, v, *value);
  if (auto it = selection_.find(v); it != selection_.end() && (!value || *value != it->second))
    throw ContradictionError("vertex " + v + " is selected at " + std::to_string(it->second) +
                             " and cannot be fixed at another value");
  Kernel k = *this;
  k.graph_ = graph_.without_incoming({v});
  k.fixed_[v] = value;
  k.selection_.erase(v);
  bool indicator = m.role(v) == VertexRole::Indicator;
  if (indicator && value == 1) k.drop_merged_proxy(v);
  if (!propensity || !expr_) {
    k.expr_.reset();
    return k;
  }
  Assignment at;
  if (value) at[*variable_of(v)] = *value;
  Expr den = substitute(*propensity, at);
  for (const auto& var : pinned_variables(den, 1)) {
    if (var == v || !m.has_role(var, VertexRole::Indicator)) continue;
    if (!k.is_random(var) || k.selection_.count(var)) continue;
    k.selection_[var] = 1;
  }
  for (const auto& [s, x] : k.selection_) at[s] = x;
  k.expr_ = Expr::ratio(substitute(*expr_, at), substitute(den, at));
  return k;
}

Kernel Kernel::consistency_swap(const std::string& base) const {
  auto r = MDag::indicator_of(base);
  if (!model_->has_role(r, VertexRole::Indicator)) throw LookupError("unknown missing variable " + base);
  auto fixed = fixed_.find(r);
  if (fixed != fixed_.end() && fixed->second == 1) return *this;
  auto holds = [&](const std::map<VertexId, int>& t) {
    auto it = t.find(r);
    return it != t.end() && it->second == 1;
  };
  if (!holds(selection_) && !holds(context_))
    throw ContradictionError("consistency swap for " + base + " requires " + r + "=1 in the kernel context");
  Kernel k = *this;
  k.swapped_.insert(base);
  return k;
}

Expr Kernel::compile() const {
  if (!expr_) throw NotCompilable("kernel contains an unresolved factor");
  return normalize(*expr_);
}

std::optional<IdentifiedConditional> Kernel::identify_conditional(const VertexId& v, const VertexSet& conditioning,
                                                                  bool require_no_bidirected) const {
  const MDag& m = *model_;
  if (!expr_ || !is_random(v) || selection_.count(v)) return std::nullopt;
  if (require_no_bidirected && !graph_.siblings(v).empty()) return std::nullopt;
  auto head = variable_of(v);
  if (!head) return std::nullopt;
  VertexSet swaps;
  for (const auto& t : conditioning) {
    if (!graph_.contains(t) || t == v) return std::nullopt;
    VertexRole role = m.role(t);
    if (role == VertexRole::Hidden) return std::nullopt;
    if (variable_of(t)) continue;
    auto r = MDag::indicator_of(*m.base_of(t));
    if (r == v || !is_random(r)) return std::nullopt;
    swaps.insert(r);
  }
  VertexSet x;
  for (const auto& [s, val] : selection_) x.insert(s);
  for (const auto& [s, val] : context_) x.insert(s);
  x.insert(swaps.begin(), swaps.end());
  VertexSet z = conditioning;
  for (const auto& [f, val] : fixed_)
    if (graph_.contains(f)) z.insert(f);
  for (const auto& s : z) x.erase(s);
  x.erase(v);
  for (auto it = x.begin(); it != x.end();) it = graph_.contains(*it) ? std::next(it) : x.erase(it);
  if (!x.empty() && !d_separated(graph_, {v}, x, z)) return std::nullopt;

  Assignment at;
  for (const auto& r : swaps) at[r] = 1;
  Expr q = substitute(*expr_, at);
  if (!q.free_variables().count(*head)) return std::nullopt;
  std::set<std::string> given;
  for (const auto& t : conditioning) {
    std::string var = variable_of(t) ? *variable_of(t) : *m.base_of(t);
    if (q.free_variables().count(var)) {
      given.insert(var);
      continue;
    }
    bool constant = fixed_.count(t) || selection_.count(t) || context_.count(t) || at.count(t);
    if (!constant) return std::nullopt;
  }
  std::set<std::string> extra;
  for (const auto& [f, val] : fixed_)
    if (!val && graph_.contains(f))
      if (auto var = variable_of(f); var && q.free_variables().count(*var) && !given.count(*var)) extra.insert(*var);

  IdentifiedConditional out{v, conditioning, conditional_of(q, *head, given, extra), swaps, {}};
  for (const auto& r : swaps)
    if (!selection_.count(r)) out.induced_selection.insert(r);
  return out;
}

Kernel Kernel::fix_indicators(const std::vector<IdentifiedConditional>& group) const {
  if (!expr_) throw NotCompilable("kernel contains an unresolved factor");
  Assignment at;
  VertexSet members;
  for (const auto& c : group) {
    if (model_->role(c.vertex) != VertexRole::Indicator) throw ArgumentError(c.vertex + " is not an indicator");
    if (!is_random(c.vertex) || selection_.count(c.vertex))
      throw ArgumentError("indicator " + c.vertex + " cannot be fixed in this kernel");
    members.insert(c.vertex);
    at[c.vertex] = 1;
    for (const auto& r : c.swapped) at[r] = 1;
  }
  std::vector<Expr> den;
  for (const auto& c : group) den.push_back(substitute(c.conditional, at));
  Kernel k = *this;
  k.graph_ = graph_.without_incoming(members);
  for (const auto& c : group) {
    k.fixed_[c.vertex] = 1;
    for (const auto& r : c.swapped)
      if (!members.count(r)) k.selection_[r] = 1;
  }
  for (const auto& p : members) {
    k.selection_.erase(p);
    k.drop_merged_proxy(p);
  }
  k.expr_ = Expr::ratio(substitute(*expr_, at), Expr::product(den));
  return k;
}

Kernel Kernel::fix_counterfactual(const IdentifiedConditional& c) const {
  if (!expr_) throw NotCompilable("kernel contains an unresolved factor");
  const MDag& m = *model_;
  if (m.role(c.vertex) != VertexRole::Counterfactual && m.role(c.vertex) != VertexRole::Observed)
    throw ArgumentError(c.vertex + " cannot be fixed at a free index");
  if (!is_random(c.vertex) || !variable_of(c.vertex)) throw ArgumentError(c.vertex + " is not observable here");
  Assignment at;
  for (const auto& r : c.swapped) at[r] = 1;
  Kernel k = *this;
  k.graph_ = graph_.without_incoming({c.vertex});
  k.fixed_[c.vertex] = std::nullopt;
  for (const auto& r : c.swapped) k.selection_[r] = 1;
  k.expr_ = Expr::ratio(substitute(*expr_, at), substitute(c.conditional, at));
  return k;
}

std::string Kernel::state_key() const {
  std::ostringstream out;
  out << "F:";
  for (const auto& [v, x] : fixed_) out << v << '=' << (x ? std::to_string(*x) : "*") << ',';
  out << "|S:";
  for (const auto& [v, x] : selection_) out << v << '=' << x << ',';
  out << "|C:";
  for (const auto& [v, x] : context_) out << v << '=' << x << ',';
  out << "|M:";
  for (const auto& v : marginalized_) out << v << ',';
  out << "|W:";
  for (const auto& b : swapped_) out << b << ',';
  return out.str();
}

Expr compile_propensity(const Kernel& k, const VertexId& r) {
  auto c = k.identify_conditional(r, k.graph().parents(r));
  if (!c) throw NotCompilable("propensity of " + r + " cannot be read from this kernel");
  Assignment at;
  for (const auto& v : c->conditional.free_variables())
    if (k.model().has_role(v, VertexRole::Indicator)) at[v] = 1;
  return normalize(substitute(c->conditional, at));
}

}  // namespace mdagid
