#include <cmath>

#include "doctest.h"
#include "mdagid/errors.hpp"
#include "mdagid/id_engine.hpp"
#include "mdagid/oracle.hpp"
#include "support.hpp"

using namespace mdagid;

namespace {

const std::vector<CanonicalModel> kIdentifiable = {
    CanonicalModel::Permutation2, CanonicalModel::BlockParallel2, CanonicalModel::BlockSequential2,
    CanonicalModel::MarExample2,  CanonicalModel::SeqPar3,        CanonicalModel::PartialOrder3,
    CanonicalModel::OutsideR4,    CanonicalModel::OddsRatio3,     CanonicalModel::OddsRatio3Equiv,
    CanonicalModel::HiddenSix};

// Largest gap between the propensity conditional and the true CPT of r with
// the other indicators at 1, skipping the "?" state of proxies.
double propensity_error(const MDag& m, const BayesNet& bn, const PropensityResult& p, const Table& obs) {
  Assignment ones;
  for (const auto& r : m.indicators())
    if (r != p.indicator) ones[r] = 1;
  const Cpt& cpt = bn.cpt(p.indicator);
  Table truth = cpt.table.slice(ones);
  Table est = eval_functional(*p.conditional, obs);
  double worst = 0.0;
  for (std::size_t c = 0; c < truth.size(); ++c) {
    Assignment a = truth.cell(c);
    bool unobservable = false;
    Assignment named;
    for (const auto& [v, x] : a) {
      if (m.has_role(v, VertexRole::Proxy) && x == m.base_cardinality(v)) unobservable = true;
      auto base = m.base_of(v);
      named[m.has_role(v, VertexRole::Counterfactual) ? *base : v] = x;
    }
    if (unobservable) continue;
    worst = std::max(worst, std::abs(truth.data()[c] - est.at(named)));
  }
  return worst;
}

}  // namespace

TEST_CASE("identifiable built-in models identify their target law") {
  for (auto c : kIdentifiable) {
    MDag m = canonical_model(c);
    CAPTURE(m.name());
    IdResult r = identify_target_law(m);
    CHECK(r.verdict == Verdict::Identified);
    REQUIRE(r.functional);
    CHECK(r.witnesses.empty());
    CHECK(r.functional->free_variables().size() == m.missing().size() + m.observed().size());
  }
}

TEST_CASE("each identified propensity equals the true mechanism") {
  for (auto c : kIdentifiable) {
    MDag m = canonical_model(c);
    CAPTURE(m.name());
    // with hidden parents the CPT is not the observable propensity
    if (!m.hidden().empty()) continue;
    IdResult r = identify_target_law(m);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      BayesNet bn = sample_bayes_net(m, seed);
      Table obs = observed_law(full_law(m, bn), m);
      for (const auto& p : r.propensities) {
        CAPTURE(p.indicator);
        REQUIRE(p.identified);
        CHECK(propensity_error(m, bn, p, obs) < 1e-10);
      }
    }
  }
}

TEST_CASE("propensity routes and reduction orders") {
  auto prop = [](CanonicalModel c, const char* r) { return identify_propensity(canonical_model(c), r); };

  auto bp = prop(CanonicalModel::BlockParallel2, "R_X1");
  CHECK(bp.route == PropensityRoute::Immediate);
  CHECK(bp.functional->text() == "p(R_X1=1 | R_X2=1, X2)");

  auto perm = prop(CanonicalModel::Permutation2, "R_X1");
  CHECK(perm.route == PropensityRoute::Search);
  CHECK(perm.partial_order() == "{ I_R_X2 < I_R_X1 }");

  auto sp = prop(CanonicalModel::SeqPar3, "R_X1");
  CHECK(sp.partial_order() == "{ {I_R_X2, I_R_X3} < I_R_X1 }");

  auto po = prop(CanonicalModel::PartialOrder3, "R_X1");
  CHECK(po.identified);
  CHECK(po.marginalized == std::vector<VertexId>{"X1", "X1(1)"});

  auto out = prop(CanonicalModel::OutsideR4, "R_X2");
  CHECK(out.partial_order() == "{ I_R_X4 < I_X4 < I_R_X1 < I_R_X2 } in G(V \\ {X2, X2(1), X3})");

  auto odds = prop(CanonicalModel::OddsRatio3, "R_X3");
  CHECK(odds.route == PropensityRoute::OddsRatio);
  CHECK(odds.partner == "R_X2");

  auto sc = prop(CanonicalModel::SelfCensor1, "R_X");
  CHECK_FALSE(sc.identified);
  CHECK_THROWS_AS(identify_propensity(canonical_model(CanonicalModel::SelfCensor1), "X(1)"), ArgumentError);
}

TEST_CASE("necessary-condition witnesses give ProvablyNotIdentified") {
  IdResult sc = identify_target_law(canonical_model(CanonicalModel::SelfCensor1));
  CHECK(sc.verdict == Verdict::ProvablyNotIdentified);
  REQUIRE(sc.witnesses.size() == 1);
  CHECK(sc.witnesses[0].kind == WitnessKind::SelfCensoring);

  IdResult cc = identify_target_law(canonical_model(CanonicalModel::CrissCross2));
  CHECK(cc.verdict == Verdict::ProvablyNotIdentified);
  REQUIRE(cc.witnesses.size() == 1);
  CHECK(cc.witnesses[0].kind == WitnessKind::CrissCross);

  IdResult co = identify_target_law(canonical_model(CanonicalModel::ConfoundedOutcome));
  CHECK(co.verdict == Verdict::ProvablyNotIdentified);
  REQUIRE(co.witnesses.size() == 1);
  CHECK(co.witnesses[0].kind == WitnessKind::ColludingPath);
}

TEST_CASE("full law verdicts") {
  for (auto c : {CanonicalModel::BlockParallel2, CanonicalModel::SeqPar3, CanonicalModel::OddsRatio3}) {
    IdResult r = identify_full_law(canonical_model(c));
    CHECK(r.verdict == Verdict::Identified);
    CHECK(r.functional);
  }
  for (auto c : {CanonicalModel::PartialOrder3, CanonicalModel::OutsideR4}) {
    IdResult r = identify_full_law(canonical_model(c));
    CHECK(r.verdict == Verdict::ProvablyNotIdentified);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses[0].kind == WitnessKind::Colluder);
  }
  // a proxy with children is only handled by the sufficient route
  CHECK(identify_full_law(canonical_model(CanonicalModel::MarExample2)).verdict ==
        Verdict::NotIdentifiedByProcedure);
  IdResult big = identify_full_law(canonical_model(CanonicalModel::HiddenSix));
  CHECK(big.verdict == Verdict::Identified);
  CHECK_FALSE(big.functional);
  CHECK(big.pieces.size() == 4);
}

TEST_CASE("full law functional reproduces the full law numerically") {
  for (auto c : {CanonicalModel::BlockParallel2, CanonicalModel::SeqPar3, CanonicalModel::OddsRatio3}) {
    MDag m = canonical_model(c);
    IdResult r = identify_full_law(m);
    REQUIRE(r.functional);
    auto rep = verify_identification(m, r, 5, 11);
    CHECK(rep.max_error < 1e-10);
  }
}

TEST_CASE("odds-ratio reconstruction of a pair of indicators") {
  MDag m = canonical_model(CanonicalModel::OddsRatio3);
  Expr joint = odds_ratio_parameterize(m, {"R_X2", "R_X3"}, {{"X1(1)", std::nullopt}});
  CHECK(joint.free_variables() == std::set<std::string>{"R_X2", "R_X3", "X1"});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Table full = sample_full_law(m, seed);
    Table pair = full.marginal({"R_X2", "R_X3", "X1(1)"}).divide(full.marginal({"X1(1)"})).rename({{"X1(1)", "X1"}});
    CHECK(max_abs_diff(pair, eval_functional(joint, observed_law(full, m))) < 1e-10);
  }
  CHECK_THROWS_AS(odds_ratio_parameterize(m, {"X1", "R_X3"}, {}), ArgumentError);
}

TEST_CASE("counterfactual outcome adjustment") {
  MDag m = canonical_model(CanonicalModel::ConfoundedOutcome);
  IdResult r = identify_counterfactual_outcome(m, {"A", "Y"});
  CHECK(r.verdict == Verdict::Identified);
  CHECK(r.functional->text() == "sum_{X} [p(Y | A, R_Y=1, X) * p(X | R_Y=1)]");
  CHECK_THROWS_AS(identify_counterfactual_outcome(canonical_model(CanonicalModel::Permutation2), {"A", "X1"}),
                  UnsupportedQuery);
  MDag open = build_mdag({"Y"}, {"A"}, {}, {{"A", "Y(1)"}, {"Y(1)", "R_Y"}});
  CHECK(identify_counterfactual_outcome(open, {"A", "Y"}).verdict == Verdict::NotIdentifiedByProcedure);
}

TEST_CASE("sequential fixing is blocked by selection on the parallel model") {
  MDag m = canonical_model(CanonicalModel::BlockParallel2);
  auto t = trace_sequential(m, {"R_X2", "R_X1"});
  CHECK(t.blocked);
  CHECK_FALSE(t.completed);
  CHECK(t.blocked_vertex == "R_X1");
  auto ok = trace_sequential(canonical_model(CanonicalModel::BlockSequential2), {"R_X1", "R_X2"});
  CHECK(ok.completed);
}

TEST_CASE("search budget exhaustion is reported, not thrown") {
  MDag m = canonical_model(CanonicalModel::PartialOrder3);
  SearchBudget tiny{-1, 1};
  auto p = identify_propensity(m, "R_X1", tiny);
  CHECK_FALSE(p.identified);
  CHECK(p.diagnostics.budget_exhausted);
  IdResult r = identify_target_law(m, tiny);
  CHECK(r.verdict == Verdict::NotIdentifiedByProcedure);
}

TEST_CASE("results round-trip through JSON and are deterministic") {
  for (auto c : canonical_models()) {
    MDag m = canonical_model(c);
    CAPTURE(m.name());
    IdResult t = identify_target_law(m);
    CHECK(id_result_from_json(to_json(t)) == t);
    CHECK(to_json(identify_target_law(m)).dump() == to_json(t).dump());
    IdResult f = identify_full_law(m);
    CHECK(id_result_from_json(to_json(f)) == f);
    CHECK_FALSE(format_text(t).empty());
  }
  CHECK_THROWS_AS(id_result_from_json(nlohmann::json{{"schema_version", 1}}), ArgumentError);
}

TEST_CASE("indicator order does not change the target verdict") {
  MDag m = canonical_model(CanonicalModel::SeqPar3);
  IdResult a = identify_target_law(m, {}, {"R_X3", "R_X1", "R_X2"});
  CHECK(a.verdict == Verdict::Identified);
  CHECK(a.propensities[0].indicator == "R_X3");
  CHECK_THROWS_AS(identify_target_law(m, {}, {"R_X1"}), ArgumentError);
}

TEST_CASE("random m-DAGs: verdicts respect witnesses and identified functionals are exact") {
  int identified = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    testsupport::RandomMDagOptions opt;
    opt.max_missing = 3;
    MDag m = testsupport::random_mdag(seed, opt);
    CAPTURE(to_text(m));
    IdResult r = identify_target_law(m);
    bool witnessed = !detect_self_censoring(m).empty() || !detect_criss_cross(m).empty();
    CHECK((r.verdict == Verdict::ProvablyNotIdentified) == witnessed);
    if (r.identified()) {
      ++identified;
      auto rep = verify_identification(m, r, 3, seed);
      CHECK(rep.max_error < 1e-8);
    }
    IdResult f = identify_full_law(m);
    if (f.identified() && f.functional) CHECK(verify_identification(m, f, 2, seed).max_error < 1e-8);
  }
  CHECK(identified > 20);
}
