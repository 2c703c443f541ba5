#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mdagid/graph.hpp"
#include "mdagid/mdag.hpp"

namespace testsupport {

// DAG on V0..V{n-1}; each forward pair of a random permutation gets an edge
// with probability p.
mdagid::Digraph random_dag(std::uint64_t seed, int n, double p);

struct RandomMDagOptions {
  int min_missing = 1;
  int max_missing = 4;
  int max_observed = 1;
  double edge_prob = 0.4;
  bool proxy_parents = true;
};

// Valid m-DAG: counterfactual/observed layer first, then indicators in a
// random order; proxies may feed later indicators.
mdagid::MDag random_mdag(std::uint64_t seed, const RandomMDagOptions& opt = {});

// Every subset of items, smallest first.
std::vector<std::set<std::string>> subsets(const std::vector<std::string>& items);

}  // namespace testsupport
