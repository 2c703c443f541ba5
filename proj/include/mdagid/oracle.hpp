#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mdagid/functional.hpp"
#include "mdagid/id_engine.hpp"
#include "mdagid/mdag.hpp"

namespace mdagid {

struct Axis {
  std::string name;
  int card;
  friend bool operator==(const Axis&, const Axis&) = default;
};

// Dense table over named discrete axes, sorted by name, row-major with the
// last axis fastest. Immutable once built.
class Table {
 public:
  Table() : data_{1.0} {}
  Table(std::vector<Axis> axes, std::vector<double> data);
  static Table scalar(double v);
  static Table filled(std::vector<Axis> axes, double v);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  bool has_axis(const std::string& name) const;
  int card(const std::string& name) const;
  std::set<std::string> names() const;

  // Keys outside the table are ignored; every axis must be assigned.
  std::size_t offset(const Assignment& a) const;
  double at(const Assignment& a) const { return data_[offset(a)]; }
  Assignment cell(std::size_t offset) const;

  Table product(const Table& o) const;
  // 0/0 is 0; a nonzero numerator over 0 throws EvaluationError.
  Table divide(const Table& o) const;
  Table sum_out(const std::set<std::string>& vars) const;
  Table marginal(const std::set<std::string>& keep) const;
  // Drops the assigned axes, keeping the slice at those values.
  Table slice(const Assignment& a) const;
  Table rename(const std::map<std::string, std::string>& names) const;
  Table scaled(double c) const;
  double total() const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> data_;
};

// max |a - b| over the cells of `reference`; `other` may carry extra states
// on shared axes but no extra axes.
double max_abs_diff(const Table& reference, const Table& other);

struct Cpt {
  VertexId head;
  std::vector<VertexId> tail;
  Table table;  // axes head ∪ tail
  double prob(const Assignment& a) const { return table.at(a); }
};

struct BayesNet {
  std::vector<Cpt> cpts;  // sorted by head
  const Cpt& cpt(const VertexId& v) const;
};

inline constexpr const char* kGeneratorId = "mt19937_64+splitmix64/dirichlet1-mix0.05";
inline constexpr double kUniformMix = 0.05;
inline constexpr double kMaxCells = 1e7;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Row-wise Dirichlet(1) draws mixed with the uniform; proxies deterministic.
BayesNet sample_bayes_net(const MDag& m, std::uint64_t seed);
// Product of every CPT over all m-DAG vertices.
Table full_law(const MDag& m, const BayesNet& bn);
inline Table sample_full_law(const MDag& m, std::uint64_t seed) { return full_law(m, sample_bayes_net(m, seed)); }

// p(r, l, w): counterfactual and hidden axes summed out.
Table observed_law(const Table& full, const MDag& m);
// p(l(1), w) renamed to base names.
Table target_law(const Table& full, const MDag& m);
// p(l(1), w, r) renamed to base names.
Table full_target_law(const Table& full, const MDag& m);
// p(Y(1) | do(A=a)) over (Y, A) by truncated factorization.
Table counterfactual_truth(const MDag& m, const BayesNet& bn, const CounterfactualQuery& q);

Table eval_functional(const Expr& f, const Table& obs);

bool ci_holds(const Table& law, const std::set<std::string>& x, const std::set<std::string>& y,
              const std::set<std::string>& z, double tol);

struct TrialResult {
  std::uint64_t seed;
  double max_error;
};

struct VerificationReport {
  std::string model;
  std::string model_hash;
  std::string generator = kGeneratorId;
  std::string query;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<TrialResult> per_trial;
  double max_error = 0.0;
  std::uint64_t worst_seed = 0;
};

std::string model_hash(const MDag& m);
VerificationReport verify_identification(const MDag& m, const IdResult& result, int trials, std::uint64_t seed);
nlohmann::json to_json(const VerificationReport& r);
std::string law_to_csv(const Table& t);

// Two full laws over (X(1), R_X, X) for X(1) -> R_X that agree on the
// observed law and differ on p(x(1)). missing_rate, when given, pins
// p(R_X=0 | x(1)) for every x.
std::pair<Table, Table> self_censoring_counterexample(int cardinality, std::uint64_t seed,
                                                      std::optional<double> missing_rate = std::nullopt);

// Hand-specified law on Permutation2 with p(R_X1=1)=0.30, p(X1=1 | R_X1=1)=0.35
// and the R_X2 strata 0.20 / 0.50 / 0.60.
BayesNet hiv_permutation_law(const MDag& permutation2);

// Fixes `indicators` at 1 in the true full law (slice, then divide by their
// CPTs at 1) and returns the largest deviation of r_k's conditional given
// its parents from its CPT, over cells with positive mass.
double fixed_propensity_deviation(const BayesNet& bn, const Table& full, const VertexId& r_k,
                                  const std::set<VertexId>& indicators);

}  // namespace mdagid
