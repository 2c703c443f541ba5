#include "mdagid/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

#include "mdagid/errors.hpp"

namespace mdagid {

namespace {

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

VertexSet names_of(const Digraph& g, const std::vector<int>& ids) {
  VertexSet out;
  for (int i : ids) out.insert(g.name(i));
  return out;
}

std::vector<char> mark(const Digraph& g, const VertexSet& vs) {
  std::vector<char> m(g.size(), 0);
  for (const auto& v : vs) m[static_cast<std::size_t>(g.index_of(v))] = 1;
  return m;
}

}  // namespace

std::string edge_text(const Edge& e) { return e.first + " -> " + e.second; }

Digraph::Digraph(std::vector<VertexId> vertices, const std::vector<Edge>& directed,
                 const std::vector<Edge>& bidirected)
    : names_(std::move(vertices)) {
  std::sort(names_.begin(), names_.end());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ArgumentError("empty vertex name");
    if (i > 0 && names_[i] == names_[i - 1]) throw ArgumentError("duplicate vertex " + names_[i]);
    index_[names_[i]] = static_cast<int>(i);
  }
  parents_.assign(names_.size(), {});
  children_.assign(names_.size(), {});
  siblings_.assign(names_.size(), {});
  for (const auto& [a, b] : directed) {
    if (a == b) throw ArgumentError("self-loop on " + a);
    int ia = index_of(a);
    int ib = index_of(b);
    if (std::find(children_[ia].begin(), children_[ia].end(), ib) != children_[ia].end())
      throw ArgumentError("duplicate edge " + edge_text({a, b}));
    children_[ia].push_back(ib);
    parents_[ib].push_back(ia);
  }
  for (const auto& [a, b] : bidirected) {
    if (a == b) throw ArgumentError("bidirected self-loop on " + a);
    int ia = index_of(a);
    int ib = index_of(b);
    if (std::find(siblings_[ia].begin(), siblings_[ia].end(), ib) != siblings_[ia].end())
      throw ArgumentError("duplicate bidirected edge " + a + " <-> " + b);
    siblings_[ia].push_back(ib);
    siblings_[ib].push_back(ia);
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    std::sort(parents_[i].begin(), parents_[i].end());
    std::sort(children_[i].begin(), children_[i].end());
    std::sort(siblings_[i].begin(), siblings_[i].end());
  }

  // Kahn pass to reject directed cycles.
  std::vector<int> indegree(names_.size());
  std::vector<int> ready;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    indegree[i] = static_cast<int>(parents_[i].size());
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int c : children_[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (seen != names_.size()) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (indegree[i] == 0) continue;
      for (int p : parents_[i])
        if (indegree[p] > 0) throw CycleError("directed cycle through edge " + edge_text({names_[p], names_[i]}));
    }
    throw CycleError("directed cycle");
  }
}

int Digraph::index_of(const VertexId& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw LookupError("unknown vertex " + v);
  return it->second;
}

VertexSet Digraph::parents(const VertexId& v) const { return names_of(*this, parents_[index_of(v)]); }
VertexSet Digraph::children(const VertexId& v) const { return names_of(*this, children_[index_of(v)]); }
VertexSet Digraph::siblings(const VertexId& v) const { return names_of(*this, siblings_[index_of(v)]); }

bool Digraph::has_edge(const VertexId& a, const VertexId& b) const {
  const auto& ch = children_[index_of(a)];
  return std::binary_search(ch.begin(), ch.end(), index_of(b));
}

bool Digraph::has_bidirected(const VertexId& a, const VertexId& b) const {
  const auto& sib = siblings_[index_of(a)];
  return std::binary_search(sib.begin(), sib.end(), index_of(b));
}

bool Digraph::adjacent(const VertexId& a, const VertexId& b) const {
  return has_edge(a, b) || has_edge(b, a) || has_bidirected(a, b);
}

std::vector<Edge> Digraph::directed_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (int c : children_[i]) out.emplace_back(names_[i], names_[c]);
  return out;
}

std::vector<Edge> Digraph::bidirected_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (int s : siblings_[i])
      if (static_cast<std::size_t>(s) > i) out.emplace_back(names_[i], names_[s]);
  return out;
}

bool Digraph::has_bidirected_edges() const {
  return std::any_of(siblings_.begin(), siblings_.end(), [](const auto& s) { return !s.empty(); });
}

Digraph Digraph::induced_subgraph(const VertexSet& keep) const {
  for (const auto& v : keep) index_of(v);
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (const auto& e : directed_edges())
    if (keep.count(e.first) && keep.count(e.second)) dir.push_back(e);
  for (const auto& e : bidirected_edges())
    if (keep.count(e.first) && keep.count(e.second)) bi.push_back(e);
  return Digraph(std::vector<VertexId>(keep.begin(), keep.end()), dir, bi);
}

Digraph Digraph::without_incoming(const VertexSet& targets) const {
  for (const auto& v : targets) index_of(v);
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (const auto& e : directed_edges())
    if (!targets.count(e.second)) dir.push_back(e);
  for (const auto& e : bidirected_edges())
    if (!targets.count(e.first) && !targets.count(e.second)) bi.push_back(e);
  return Digraph(names_, dir, bi);
}

VertexSet genealogy(const Digraph& g, const VertexId& v, Relation relation) {
  switch (relation) {
    case Relation::Parents:
      return g.parents(v);
    case Relation::Children:
      return g.children(v);
    case Relation::Descendants:
      return descendants_of(g, {v});
    case Relation::Ancestors:
      return ancestors_of(g, {v});
  }
  return {};
}

namespace {

VertexSet reach(const Digraph& g, const VertexSet& start, bool upward) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack;
  for (const auto& v : start) {
    int i = g.index_of(v);
    if (!seen[i]) {
      seen[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int n : upward ? g.parent_ids(v) : g.child_ids(v))
      if (!seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
  }
  VertexSet out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (seen[i]) out.insert(g.name(static_cast<int>(i)));
  return out;
}

}  // namespace

VertexSet ancestors_of(const Digraph& g, const VertexSet& vs) { return reach(g, vs, true); }
VertexSet descendants_of(const Digraph& g, const VertexSet& vs) { return reach(g, vs, false); }

std::size_t TopoOrder::position(const VertexId& v) const {
  auto it = std::find(sequence.begin(), sequence.end(), v);
  if (it == sequence.end()) throw LookupError("vertex " + v + " not in order");
  return static_cast<std::size_t>(it - sequence.begin());
}

TopoOrder topological_order(const Digraph& g, const std::map<VertexId, int>& tier) {
  using Key = std::tuple<int, VertexId, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  std::vector<int> indegree(g.size());
  auto tier_of = [&](int i) {
    auto it = tier.find(g.name(i));
    return it == tier.end() ? 0 : it->second;
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    int id = static_cast<int>(i);
    indegree[i] = static_cast<int>(g.parent_ids(id).size());
    if (indegree[i] == 0) ready.emplace(tier_of(id), g.name(id), id);
  }
  TopoOrder order;
  while (!ready.empty()) {
    int v = std::get<2>(ready.top());
    ready.pop();
    order.sequence.push_back(g.name(v));
    for (int c : g.child_ids(v))
      if (--indegree[c] == 0) ready.emplace(tier_of(c), g.name(c), c);
  }
  return order;
}

bool is_topological(const Digraph& g, const TopoOrder& order) {
  if (order.sequence.size() != g.size()) return false;
  std::map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < order.sequence.size(); ++i) {
    if (!g.contains(order.sequence[i]) || pos.count(order.sequence[i])) return false;
    pos[order.sequence[i]] = i;
  }
  for (const auto& [a, b] : g.directed_edges())
    if (pos[a] >= pos[b]) return false;
  return true;
}

namespace {

void check_query(const Digraph& g, const VertexSet& x, const VertexSet& y, const VertexSet& z) {
  for (const auto* s : {&x, &y, &z})
    for (const auto& v : *s) g.index_of(v);
  for (const auto& v : x)
    if (y.count(v) || z.count(v)) throw ArgumentError("vertex " + v + " appears in more than one argument set");
  for (const auto& v : y)
    if (z.count(v)) throw ArgumentError("vertex " + v + " appears in more than one argument set");
}

// States are (vertex, arrived-with-arrowhead). A vertex entered through a
// tail may only continue as a non-collider.
std::optional<std::vector<VertexId>> search_active(const Digraph& g, const VertexSet& x, const VertexSet& y,
                                                   const VertexSet& z) {
  check_query(g, x, y, z);
  if (x.empty() || y.empty()) return std::nullopt;
  auto in_z = mark(g, z);
  auto in_y = mark(g, y);
  auto an_z = mark(g, ancestors_of(g, z));
  const std::size_t n = g.size();
  std::vector<int> pred(2 * n, -2);
  std::deque<int> queue;
  for (const auto& v : x) {
    int s = 2 * g.index_of(v);
    pred[s] = -1;
    queue.push_back(s);
  }
  auto push = [&](int from, int v, bool head) {
    int s = 2 * v + (head ? 1 : 0);
    if (pred[s] != -2) return false;
    pred[s] = from;
    queue.push_back(s);
    return in_y[v] != 0;
  };
  auto rebuild = [&](int s) {
    std::vector<VertexId> path;
    for (int c = s; c >= 0; c = pred[c]) path.push_back(g.name(c / 2));
    std::reverse(path.begin(), path.end());
    return path;
  };
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    int v = s / 2;
    bool head = (s % 2) == 1;
    bool pass_through = !in_z[v];
    bool collide = head && an_z[v];
    if (!head) {
      if (!pass_through) continue;
      for (int p : g.parent_ids(v))
        if (push(s, p, false)) return rebuild(2 * p);
      for (int c : g.child_ids(v))
        if (push(s, c, true)) return rebuild(2 * c + 1);
      for (int b : g.sibling_ids(v))
        if (push(s, b, true)) return rebuild(2 * b + 1);
    } else {
      if (pass_through)
        for (int c : g.child_ids(v))
          if (push(s, c, true)) return rebuild(2 * c + 1);
      if (collide) {
        for (int p : g.parent_ids(v))
          if (push(s, p, false)) return rebuild(2 * p);
        for (int b : g.sibling_ids(v))
          if (push(s, b, true)) return rebuild(2 * b + 1);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

bool d_separated(const Digraph& g, const VertexSet& x, const VertexSet& y, const VertexSet& z) {
  return !search_active(g, x, y, z).has_value();
}

std::optional<std::vector<VertexId>> active_path(const Digraph& g, const VertexSet& x, const VertexSet& y,
                                                 const VertexSet& z) {
  return search_active(g, x, y, z);
}

bool d_separated_moral(const Digraph& g, const VertexSet& x, const VertexSet& y, const VertexSet& z) {
  check_query(g, x, y, z);
  // Expand a <-> b into a fresh latent parent of both.
  const int n = static_cast<int>(g.size());
  std::vector<std::vector<int>> parents(g.size());
  for (int i = 0; i < n; ++i) parents[i] = g.parent_ids(i);
  int next = n;
  for (const auto& [a, b] : g.bidirected_edges()) {
    parents.emplace_back();
    parents[g.index_of(a)].push_back(next);
    parents[g.index_of(b)].push_back(next);
    ++next;
  }
  const int total = next;
  std::vector<char> keep(total, 0);
  std::vector<int> stack;
  for (const auto* s : {&x, &y, &z})
    for (const auto& v : *s) {
      int i = g.index_of(v);
      if (!keep[i]) {
        keep[i] = 1;
        stack.push_back(i);
      }
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v < n)
      for (int p : parents[v])
        if (!keep[p]) {
          keep[p] = 1;
          stack.push_back(p);
        }
  }
  std::vector<std::vector<int>> adj(total);
  auto link = [&](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& ps = parents[v];
    for (std::size_t i = 0; i < ps.size(); ++i) {
      link(ps[i], v);
      for (std::size_t j = i + 1; j < ps.size(); ++j) link(ps[i], ps[j]);
    }
  }
  auto in_z = mark(g, z);
  auto in_y = mark(g, y);
  std::vector<char> seen(total, 0);
  for (const auto& v : x) {
    int i = g.index_of(v);
    seen[i] = 1;
    stack.push_back(i);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v < n && in_y[v]) return false;
    for (int w : adj[v]) {
      if (seen[w] || (w < n && in_z[w])) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return true;
}

Digraph latent_project(const Digraph& g, const VertexSet& hide) {
  for (const auto& v : hide) g.index_of(v);
  if (!g.vertices().empty() && hide.size() == g.size()) throw ArgumentError("cannot project out every vertex");
  if (hide.empty()) return g;
  auto hidden = mark(g, hide);
  const int n = static_cast<int>(g.size());
  // Visible vertices reachable from v by directed paths whose intermediate
  // vertices are all hidden.
  std::vector<std::vector<int>> reach_vis(g.size());
  for (int v = 0; v < n; ++v) {
    std::vector<char> seen(g.size(), 0);
    std::vector<int> stack(g.child_ids(v).begin(), g.child_ids(v).end());
    for (int c : stack) seen[c] = 1;
    while (!stack.empty()) {
      int w = stack.back();
      stack.pop_back();
      if (!hidden[w]) {
        reach_vis[v].push_back(w);
        continue;
      }
      for (int c : g.child_ids(w))
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
    }
    sort_unique(reach_vis[v]);
  }
  std::set<std::pair<int, int>> dir;
  std::set<std::pair<int, int>> bi;
  auto add_bi = [&](int a, int b) {
    if (a != b) bi.emplace(std::min(a, b), std::max(a, b));
  };
  auto endpoints = [&](int v) { return hidden[v] ? reach_vis[v] : std::vector<int>{v}; };
  for (int v = 0; v < n; ++v) {
    if (hidden[v]) {
      const auto& r = reach_vis[v];
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) add_bi(r[i], r[j]);
    } else {
      for (int w : reach_vis[v]) dir.emplace(v, w);
    }
  }
  for (const auto& [a, b] : g.bidirected_edges())
    for (int u : endpoints(g.index_of(a)))
      for (int w : endpoints(g.index_of(b))) add_bi(u, w);

  std::vector<VertexId> keep;
  for (int v = 0; v < n; ++v)
    if (!hidden[v]) keep.push_back(g.name(v));
  std::vector<Edge> dedges;
  std::vector<Edge> bedges;
  for (const auto& [a, b] : dir) dedges.emplace_back(g.name(a), g.name(b));
  for (const auto& [a, b] : bi) bedges.emplace_back(g.name(a), g.name(b));
  return Digraph(keep, dedges, bedges);
}

VertexSet district(const Digraph& g, const VertexId& v) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack{g.index_of(v)};
  seen[stack.back()] = 1;
  VertexSet out;
  while (!stack.empty()) {
    int w = stack.back();
    stack.pop_back();
    out.insert(g.name(w));
    for (int s : g.sibling_ids(w))
      if (!seen[s]) {
        seen[s] = 1;
        stack.push_back(s);
      }
  }
  return out;
}

std::vector<VertexSet> districts(const Digraph& g) {
  std::vector<VertexSet> out;
  VertexSet covered;
  for (const auto& v : g.vertices()) {
    if (covered.count(v)) continue;
    auto d = district(g, v);
    covered.insert(d.begin(), d.end());
    out.push_back(std::move(d));
  }
  return out;
}

VertexSet markov_pillow(const Digraph& g, const VertexId& v, const TopoOrder& order) {
  g.index_of(v);
  if (!is_topological(g, order)) throw ArgumentError("order is not a topological order of the graph");
  VertexSet prefix;
  for (const auto& w : order.sequence) {
    prefix.insert(w);
    if (w == v) break;
  }
  Digraph sub = g.induced_subgraph(prefix);
  VertexSet dis = district(sub, v);
  VertexSet out = dis;
  for (const auto& d : dis)
    for (const auto& p : sub.parents(d)) out.insert(p);
  out.erase(v);
  return out;
}

}  // namespace mdagid
