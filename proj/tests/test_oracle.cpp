#include <cmath>

#include "doctest.h"
#include "mdagid/errors.hpp"
#include "mdagid/oracle.hpp"
#include "support.hpp"

using namespace mdagid;

TEST_CASE("table algebra on hand values") {
  Table a({{"A", 2}}, {0.25, 0.75});
  Table b({{"A", 2}, {"B", 2}}, {0.1, 0.2, 0.3, 0.4});
  Table p = a.product(b);
  CHECK(p.at({{"A", 1}, {"B", 0}}) == doctest::Approx(0.225));
  CHECK(b.sum_out({"A"}).data()[0] == doctest::Approx(0.4));
  CHECK(b.sum_out({"A"}).data()[1] == doctest::Approx(0.6));
  CHECK(b.marginal({"A"}).at({{"A", 0}}) == doctest::Approx(0.3));
  CHECK(b.slice({{"B", 1}}).data() == std::vector<double>{0.2, 0.4});
  Table r = b.rename({{"A", "Z"}});
  CHECK(r.axes()[0].name == "B");
  CHECK(r.at({{"Z", 1}, {"B", 0}}) == 0.3);
  CHECK(b.total() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Table({{"B", 2}, {"A", 2}}, {0, 0, 0, 0}), ArgumentError);
  CHECK_THROWS_AS(a.product(Table({{"A", 3}}, {1, 1, 1})), ArgumentError);
}

TEST_CASE("division follows the 0/0 convention and reports the bad cell") {
  Table n({{"A", 2}}, {0.0, 1.0});
  Table d({{"A", 2}}, {0.0, 2.0});
  CHECK(n.divide(d).data() == std::vector<double>{0.0, 0.5});
  try {
    Table({{"A", 2}}, {1.0, 1.0}).divide(d);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("A=0") != std::string::npos);
  }
}

TEST_CASE("sampled full laws are normalized, positive and consistent") {
  MDag m = canonical_model(CanonicalModel::SelfCensor1);
  Table full = sample_full_law(m, 5);
  CHECK(full.size() == 12);
  CHECK(full.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t c = 0; c < full.size(); ++c) {
    Assignment a = full.cell(c);
    bool consistent = a["R_X"] == 1 ? a["X"] == a["X(1)"] : a["X"] == 2;
    if (consistent) CHECK(full.data()[c] > 0.0);
    else CHECK(full.data()[c] == 0.0);
  }
  CHECK(sample_full_law(m, 5).data() == full.data());
  CHECK(sample_full_law(m, 6).data() != full.data());

  BayesNet bn = sample_bayes_net(canonical_model(CanonicalModel::SeqPar3), 2);
  for (const auto& cpt : bn.cpts) {
    if (canonical_model(CanonicalModel::SeqPar3).has_role(cpt.head, VertexRole::Proxy)) continue;
    for (double p : cpt.table.data()) CHECK(p >= kUniformMix / cpt.table.card(cpt.head) - 1e-15);
  }
}

TEST_CASE("sampled laws satisfy every d-separation of their m-DAG") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    testsupport::RandomMDagOptions opt;
    opt.max_missing = 3;
    MDag m = testsupport::random_mdag(seed, opt);
    Table full = sample_full_law(m, seed);
    const auto& vs = m.graph().vertices();
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        std::vector<VertexId> rest;
        for (const auto& v : vs)
          if (v != vs[i] && v != vs[j]) rest.push_back(v);
        for (const auto& z : testsupport::subsets(rest)) {
          if (z.size() > 2) break;
          if (d_separated(m.graph(), {vs[i]}, {vs[j]}, z)) CHECK(ci_holds(full, {vs[i]}, {vs[j]}, z, 1e-10));
        }
      }
  }
}

TEST_CASE("conditional independence checks on known laws") {
  MDag bp = canonical_model(CanonicalModel::BlockParallel2);
  Table full = sample_full_law(bp, 7);
  CHECK(ci_holds(full, {"R_X1"}, {"R_X2"}, {"X2(1)"}, 1e-10));
  CHECK_FALSE(ci_holds(full, {"R_X1"}, {"R_X2"}, {}, 1e-6));

  MDag seq = canonical_model(CanonicalModel::BlockSequential2);
  for (std::uint64_t s = 0; s < 5; ++s)
    CHECK(ci_holds(sample_full_law(seq, s), {"R_X1"}, {"X1(1)", "X2(1)"}, {}, 1e-10));

  Table indep = Table({{"A", 2}}, {0.3, 0.7}).product(Table({{"B", 2}}, {0.6, 0.4}));
  CHECK(ci_holds(indep, {"A"}, {"B"}, {}, 1e-12));
  auto d = indep.data();
  d[0] += 0.01;
  d[1] -= 0.01;
  CHECK_FALSE(ci_holds(Table(indep.axes(), d), {"A"}, {"B"}, {}, 1e-6));
  CHECK_THROWS_AS(ci_holds(indep, {"A"}, {"A"}, {}, 1e-6), ArgumentError);
}

TEST_CASE("observed and target laws") {
  MDag mcar = build_mdag({"X"}, {}, {}, {});
  Table full = sample_full_law(mcar, 1);
  Table obs = observed_law(full, mcar);
  CHECK(obs.names() == std::set<std::string>{"R_X", "X"});
  CHECK(obs.at({{"R_X", 0}, {"X", 2}}) == doctest::Approx(full.marginal({"R_X"}).at({{"R_X", 0}})).epsilon(1e-14));

  MDag six = canonical_model(CanonicalModel::HiddenSix);
  Table f6 = sample_full_law(six, 2);
  Table o6 = observed_law(f6, six);
  for (const auto& u : {"U1", "U2", "U3"}) CHECK_FALSE(o6.has_axis(u));
  CHECK(o6.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(target_law(f6, six).names() == std::set<std::string>{"X1", "X2", "X3", "X4", "X5", "X6"});

  MDag perm = canonical_model(CanonicalModel::Permutation2);
  Table fp = sample_full_law(perm, 3);
  Table t = target_law(fp, perm);
  double direct = 0.0;
  for (std::size_t c = 0; c < fp.size(); ++c) {
    Assignment a = fp.cell(c);
    if (a["X1(1)"] == 1 && a["X2(1)"] == 0) direct += fp.data()[c];
  }
  CHECK(t.at({{"X1", 1}, {"X2", 0}}) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("state-space guard") {
  std::vector<std::string> many;
  std::map<std::string, int> cards;
  for (int i = 1; i <= 6; ++i) {
    many.push_back("X" + std::to_string(i));
    cards[many.back()] = 4;
  }
  MDag big = build_mdag(many, {}, {}, {}, cards);
  CHECK_THROWS_AS(sample_bayes_net(big, 0), StateSpaceError);
}

TEST_CASE("functional evaluation") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  Table obs = observed_law(sample_full_law(m, 4), m);
  Expr id = Expr::atom({"R_X1", "R_X2", "X1", "X2"});
  CHECK(max_abs_diff(obs, eval_functional(id, obs)) < 1e-15);

  Expr summed = Expr::sum({"R_X1"}, Expr::atom({"X1"}, {"R_X2"}));
  Table twice = eval_functional(summed, obs);
  Table once = eval_functional(Expr::atom({"X1"}, {"R_X2"}), obs);
  CHECK(max_abs_diff(once.scaled(2.0), twice) < 1e-15);

  Expr sel = Expr::select({{"R_X1", 0}}, Expr::constant(2.0), Expr::constant(5.0));
  Table s = eval_functional(sel, obs);
  CHECK(s.at({{"R_X1", 0}}) == 2.0);
  CHECK(s.at({{"R_X1", 1}}) == 5.0);

  CHECK_THROWS_AS(eval_functional(Expr::atom({"Q"}), obs), EvaluationError);
}

TEST_CASE("evaluation is linear for sums and scale-free for conditionals") {
  MDag m = canonical_model(CanonicalModel::MarExample2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Table a = observed_law(sample_full_law(m, seed), m);
    Table b = observed_law(sample_full_law(m, seed + 100), m);
    std::vector<double> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 0.3 * a.data()[i] + 0.7 * b.data()[i];
    Table ab(a.axes(), mix);
    Expr lin = Expr::sum({"X2"}, Expr::atom({"R_X1", "R_X2", "X1", "X2"}, {}, {{"R_X1", 1}}));
    Table lhs = eval_functional(lin, ab);
    Table rhs_a = eval_functional(lin, a), rhs_b = eval_functional(lin, b);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs.data()[i] == doctest::Approx(0.3 * rhs_a.data()[i] + 0.7 * rhs_b.data()[i]).epsilon(1e-13));

    Expr cond = Expr::atom({"X2"}, {"R_X1", "X1"}, {{"R_X1", 1}});
    CHECK(max_abs_diff(eval_functional(cond, a), eval_functional(cond, a.scaled(3.7))) < 1e-14);
  }
}

TEST_CASE("verification reports") {
  MDag mcar = build_mdag({"X1", "X2"}, {}, {}, {{"X1(1)", "X2(1)"}});
  IdResult r = identify_target_law(mcar);
  REQUIRE(r.identified());
  auto rep = verify_identification(mcar, r, 10, 9);
  CHECK(rep.max_error < 1e-12);
  CHECK(rep.per_trial.size() == 10);
  CHECK(rep.model_hash.size() == 16);
  CHECK(rep.generator == kGeneratorId);
  auto j = to_json(rep);
  CHECK(j["trials"] == 10);
  CHECK(j["per_trial"].size() == 10);
  CHECK(verify_identification(mcar, r, 10, 9).per_trial[3].seed == rep.per_trial[3].seed);

  IdResult bad = identify_target_law(canonical_model(CanonicalModel::SelfCensor1));
  CHECK_THROWS_AS(verify_identification(canonical_model(CanonicalModel::SelfCensor1), bad, 1, 0), ArgumentError);

  std::string csv = law_to_csv(Table({{"A", 2}}, {0.25, 0.75}));
  CHECK(csv == "A,p\n0,0.25\n1,0.75\n");
}

TEST_CASE("self-censoring counterexample") {
  for (int k = 2; k <= 4; ++k)
    for (std::uint64_t seed = 1; seed < 6; ++seed) {
      auto [a, b] = self_censoring_counterexample(k, seed);
      CHECK(a.total() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.total() == doctest::Approx(1.0).epsilon(1e-12));
      Table oa = a.marginal({"R_X", "X"}), ob = b.marginal({"R_X", "X"});
      CHECK(max_abs_diff(oa, ob) < 1e-12);
      Table ta = a.marginal({"X(1)"}), tb = b.marginal({"X(1)"});
      CHECK(max_abs_diff(ta, tb) >= 0.05);
      Table joint_b = b.marginal({"X(1)", "R_X"});
      for (double p : joint_b.data()) CHECK(p > 0.0);
    }
  CHECK_THROWS_AS(self_censoring_counterexample(2, 1, 0.0), ArgumentError);
  CHECK_THROWS_AS(self_censoring_counterexample(2, 1, 1.0), ArgumentError);
}

TEST_CASE("hand-specified law on the permutation model") {
  MDag m = canonical_model(CanonicalModel::Permutation2);
  BayesNet bn = hiv_permutation_law(m);
  Table full = full_law(m, bn);
  Table obs = observed_law(full, m);
  CHECK(obs.marginal({"R_X1"}).at({{"R_X1", 1}}) == doctest::Approx(0.30).epsilon(1e-12));
  Table r1 = obs.slice({{"R_X1", 1}}).marginal({"X1"});
  CHECK(r1.at({{"X1", 1}}) / r1.total() == doctest::Approx(0.35).epsilon(1e-12));
  IdResult r = identify_target_law(m);
  CHECK(max_abs_diff(target_law(full, m), eval_functional(*r.functional, obs)) < 1e-12);
}

TEST_CASE("fixing other indicators leaves a propensity unchanged on the true law") {
  MDag m = canonical_model(CanonicalModel::SeqPar3);
  BayesNet bn = sample_bayes_net(m, 12);
  Table full = full_law(m, bn);
  CHECK(fixed_propensity_deviation(bn, full, "R_X1", {"R_X2", "R_X3"}) < 1e-12);
  CHECK(fixed_propensity_deviation(bn, full, "R_X3", {"R_X2"}) < 1e-12);
  CHECK_THROWS_AS(fixed_propensity_deviation(bn, full, "R_X1", {"R_X1"}), ArgumentError);
}

TEST_CASE("counterfactual truth is a distribution for every treatment value") {
  MDag m = canonical_model(CanonicalModel::ConfoundedOutcome);
  BayesNet bn = sample_bayes_net(m, 3);
  Table t = counterfactual_truth(m, bn, {"A", "Y"});
  for (int a = 0; a < 2; ++a) CHECK(t.slice({{"A", a}}).total() == doctest::Approx(1.0).epsilon(1e-12));
}
