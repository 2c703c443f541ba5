#include "doctest.h"
#include "mdagid/errors.hpp"
#include "mdagid/kernel.hpp"
#include "mdagid/oracle.hpp"

using namespace mdagid;

namespace {

// True CPT of r with counterfactual parents renamed to their observed names.
Table cpt_in_observed_names(const MDag& m, const BayesNet& bn, const VertexId& r) {
  std::map<std::string, std::string> names;
  for (const auto& b : m.missing()) names[MDag::counterfactual_of(b)] = b;
  return bn.cpt(r).table.rename(names);
}

}  // namespace

TEST_CASE("initial kernel compiles to the observed law") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  Kernel k = Kernel::from_mdag(m);
  Table obs = observed_law(sample_full_law(m, 3), m);
  CHECK(max_abs_diff(obs, eval_functional(k.compile(), obs)) < 1e-15);
  CHECK(k.factors().size() == m.graph().vertices().size());
  CHECK(k.variable_of("X1") == std::optional<std::string>("X1"));
  CHECK_FALSE(k.variable_of("X1(1)"));
}

TEST_CASE("conditional read off by a consistency swap matches the true mechanism") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  Kernel k = Kernel::from_mdag(m);
  auto c = k.identify_conditional("R_X1", {"X2(1)"});
  REQUIRE(c);
  CHECK(c->swapped == VertexSet{"R_X2"});
  CHECK(normalize(c->conditional).text() == "p(R_X1 | R_X2=1, X2)");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BayesNet bn = sample_bayes_net(m, seed);
    Table obs = observed_law(full_law(m, bn), m);
    CHECK(max_abs_diff(cpt_in_observed_names(m, bn, "R_X1"), eval_functional(c->conditional, obs)) < 1e-12);
  }
}

TEST_CASE("fixing an indicator merges its proxy and may induce selection") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  Kernel k = Kernel::from_mdag(m);
  auto c2 = k.identify_conditional("R_X2", {"X1(1)"});
  REQUIRE(c2);
  Kernel f = k.fix("R_X2", 1, c2->conditional);
  CHECK(f.is_fixed("R_X2"));
  CHECK_FALSE(f.graph().contains("X2"));
  CHECK(f.variable_of("X2(1)") == std::optional<std::string>("X2"));
  CHECK(f.is_selected("R_X1"));
  try {
    f.marginalize({"R_X1"});
    FAIL("expected SelectionBlocked");
  } catch (const SelectionBlocked& e) {
    CHECK(e.vertex() == "R_X1");
  }
  CHECK(f.state_key() != k.state_key());
  CHECK_THROWS_AS(f.fix("R_X2", 1, std::nullopt), ArgumentError);
  CHECK_THROWS_AS(f.fix("R_X1", 0, std::nullopt), ContradictionError);
}

TEST_CASE("fix without a propensity leaves the kernel uncompilable") {
  MDag m = canonical_model(CanonicalModel::BlockSequential2);
  Kernel k = Kernel::from_mdag(m).fix("R_X1", 1, std::nullopt);
  CHECK_FALSE(k.identified());
  CHECK_THROWS_AS(k.compile(), NotCompilable);
}

TEST_CASE("consistency swap needs the indicator at 1") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  Kernel k = Kernel::from_mdag(m);
  CHECK_THROWS_AS(k.consistency_swap("X1"), ContradictionError);
  Kernel e = k.evaluate_at({{"R_X1", 1}});
  Kernel s = e.consistency_swap("X1");
  CHECK(s.variable_of("X1(1)") == std::optional<std::string>("X1"));
  CHECK_THROWS_AS(k.evaluate_at({{"R_X1", 2}}), ArgumentError);
}

TEST_CASE("marginalizing hidden variables yields bidirected edges") {
  MDag m = canonical_model(CanonicalModel::HiddenSix);
  Kernel k = Kernel::from_mdag(m).marginalize({"U1", "U2", "U3"});
  CHECK(k.graph().has_bidirected("R_X3", "R_X4"));
  CHECK_FALSE(k.graph().contains("U1"));
  Table obs = observed_law(sample_full_law(m, 1), m);
  CHECK(max_abs_diff(obs, eval_functional(k.compile(), obs)) < 1e-15);
  CHECK_THROWS_AS(k.marginalize({"U1"}), LookupError);
}

TEST_CASE("compile_propensity evaluates at every indicator equal to 1") {
  MDag m = canonical_model(CanonicalModel::MarExample2);
  Kernel k = Kernel::from_mdag(m);
  Expr p = compile_propensity(k, "R_X2");
  CHECK(p.text() == "p(R_X2=1 | R_X1=1, X1)");
}
