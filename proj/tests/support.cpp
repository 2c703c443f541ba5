#include "support.hpp"

#include <algorithm>

namespace testsupport {

using namespace mdagid;

mdagid::Digraph random_dag(std::uint64_t seed, int n, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<VertexId> names;
  for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
  auto order = names;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(order[i], order[j]);
  return Digraph(names, edges);
}

mdagid::MDag random_mdag(std::uint64_t seed, const RandomMDagOptions& opt) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(opt.edge_prob);
  int k = std::uniform_int_distribution<int>(opt.min_missing, opt.max_missing)(rng);
  int w = std::uniform_int_distribution<int>(0, opt.max_observed)(rng);
  MDagSpec spec;
  spec.name = "random" + std::to_string(seed);
  for (int i = 1; i <= k; ++i) spec.missing.push_back("X" + std::to_string(i));
  for (int i = 1; i <= w; ++i) spec.observed.push_back("W" + std::to_string(i));

  std::vector<VertexId> layer;
  for (const auto& b : spec.missing) layer.push_back(MDag::counterfactual_of(b));
  for (const auto& o : spec.observed) layer.push_back(o);
  std::shuffle(layer.begin(), layer.end(), rng);
  for (std::size_t i = 0; i < layer.size(); ++i)
    for (std::size_t j = i + 1; j < layer.size(); ++j)
      if (coin(rng)) spec.edges.emplace_back(layer[i], layer[j]);

  auto bases = spec.missing;
  std::shuffle(bases.begin(), bases.end(), rng);
  for (std::size_t i = 0; i < bases.size(); ++i) {
    auto r = MDag::indicator_of(bases[i]);
    for (const auto& v : layer)
      if (coin(rng)) spec.edges.emplace_back(v, r);
    for (std::size_t j = 0; j < i; ++j) {
      if (coin(rng)) spec.edges.emplace_back(MDag::indicator_of(bases[j]), r);
      else if (opt.proxy_parents && coin(rng)) spec.edges.emplace_back(MDag::proxy_of(bases[j]), r);
    }
  }
  // Drop a counterfactual edge when its proxy already feeds the same indicator.
  std::set<Edge> present(spec.edges.begin(), spec.edges.end());
  std::vector<Edge> kept;
  for (const auto& e : spec.edges) {
    bool shadowed = false;
    for (const auto& b : spec.missing)
      if (e.first == MDag::counterfactual_of(b) && present.count({MDag::proxy_of(b), e.second})) shadowed = true;
    if (!shadowed) kept.push_back(e);
  }
  spec.edges = kept;
  return build_mdag(spec);
}

std::vector<std::set<std::string>> subsets(const std::vector<std::string>& items) {
  std::vector<std::set<std::string>> out;
  const std::size_t n = items.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::set<std::string> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.insert(items[i]);
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

}  // namespace testsupport
