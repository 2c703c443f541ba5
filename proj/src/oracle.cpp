#include "mdagid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_map>

#include "mdagid/errors.hpp"

namespace mdagid {

namespace {

std::vector<std::size_t> strides_of(const std::vector<Axis>& axes) {
  std::vector<std::size_t> s(axes.size());
  std::size_t acc = 1;
  for (std::size_t i = axes.size(); i-- > 0;) {
    s[i] = acc;
    acc *= static_cast<std::size_t>(axes[i].card);
  }
  return s;
}

std::size_t cell_count(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.card);
  return n;
}

// Stride of each `target` axis inside `src`, 0 where src lacks it.
std::vector<std::size_t> aligned_strides(const std::vector<Axis>& target, const Table& src) {
  auto s = strides_of(src.axes());
  std::vector<std::size_t> out(target.size(), 0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t j = 0; j < src.axes().size(); ++j) {
      if (src.axes()[j].name != target[i].name) continue;
      if (src.axes()[j].card != target[i].card)
        throw ArgumentError("axis " + target[i].name + " has mismatched cardinalities");
      out[i] = s[j];
    }
  }
  return out;
}

// Visits every cell of `axes` in row-major order, tracking offsets into
// several sources through their aligned strides.
template <typename F>
void odometer(const std::vector<Axis>& axes, const std::vector<std::vector<std::size_t>>& strides, F&& visit) {
  std::vector<int> idx(axes.size(), 0);
  std::vector<std::size_t> off(strides.size(), 0);
  std::size_t n = cell_count(axes);
  for (std::size_t cell = 0; cell < n; ++cell) {
    visit(cell, off);
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++idx[i] < axes[i].card) {
        for (std::size_t k = 0; k < strides.size(); ++k) off[k] += strides[k][i];
        break;
      }
      for (std::size_t k = 0; k < strides.size(); ++k) off[k] -= strides[k][i] * (axes[i].card - 1);
      idx[i] = 0;
    }
  }
}

std::vector<Axis> union_axes(const std::vector<Axis>& a, const std::vector<Axis>& b) {
  std::map<std::string, int> m;
  for (const auto& x : a) m[x.name] = x.card;
  for (const auto& x : b) {
    auto [it, fresh] = m.emplace(x.name, x.card);
    if (!fresh && it->second != x.card) throw ArgumentError("axis " + x.name + " has mismatched cardinalities");
  }
  std::vector<Axis> out;
  for (const auto& [n, c] : m) out.push_back({n, c});
  return out;
}

std::string describe(const Assignment& a) {
  std::string s;
  for (const auto& [k, v] : a) s += (s.empty() ? "" : ", ") + k + "=" + std::to_string(v);
  return "{" + s + "}";
}

}  // namespace

Table::Table(std::vector<Axis> axes, std::vector<double> data) : axes_(std::move(axes)), data_(std::move(data)) {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].card < 1) throw ArgumentError("axis " + axes_[i].name + " has no states");
    if (i && !(axes_[i - 1].name < axes_[i].name)) throw ArgumentError("table axes must be sorted and distinct");
  }
  if (data_.size() != cell_count(axes_)) throw ArgumentError("table data does not match its axes");
}

Table Table::scalar(double v) { return Table({}, {v}); }

Table Table::filled(std::vector<Axis> axes, double v) {
  std::sort(axes.begin(), axes.end(), [](const Axis& a, const Axis& b) { return a.name < b.name; });
  auto n = cell_count(axes);
  return Table(std::move(axes), std::vector<double>(n, v));
}

bool Table::has_axis(const std::string& name) const {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

int Table::card(const std::string& name) const {
  for (const auto& a : axes_)
    if (a.name == name) return a.card;
  throw LookupError("table has no axis " + name);
}

std::set<std::string> Table::names() const {
  std::set<std::string> s;
  for (const auto& a : axes_) s.insert(a.name);
  return s;
}

std::size_t Table::offset(const Assignment& a) const {
  std::size_t off = 0;
  for (const auto& ax : axes_) {
    auto it = a.find(ax.name);
    if (it == a.end()) throw ArgumentError("no value for axis " + ax.name);
    if (it->second < 0 || it->second >= ax.card)
      throw ArgumentError("value " + std::to_string(it->second) + " out of range for axis " + ax.name);
    off = off * static_cast<std::size_t>(ax.card) + static_cast<std::size_t>(it->second);
  }
  return off;
}

Assignment Table::cell(std::size_t offset) const {
  Assignment a;
  for (std::size_t i = axes_.size(); i-- > 0;) {
    a[axes_[i].name] = static_cast<int>(offset % static_cast<std::size_t>(axes_[i].card));
    offset /= static_cast<std::size_t>(axes_[i].card);
  }
  return a;
}

Table Table::product(const Table& o) const {
  auto axes = union_axes(axes_, o.axes_);
  std::vector<double> out(cell_count(axes));
  odometer(axes, {aligned_strides(axes, *this), aligned_strides(axes, o)},
           [&](std::size_t c, const std::vector<std::size_t>& off) { out[c] = data_[off[0]] * o.data_[off[1]]; });
  return Table(std::move(axes), std::move(out));
}

Table Table::divide(const Table& o) const {
  auto axes = union_axes(axes_, o.axes_);
  std::vector<double> out(cell_count(axes));
  odometer(axes, {aligned_strides(axes, *this), aligned_strides(axes, o)},
           [&](std::size_t c, const std::vector<std::size_t>& off) {
             double n = data_[off[0]], d = o.data_[off[1]];
             if (d != 0.0) {
               out[c] = n / d;
             } else if (n == 0.0) {
               out[c] = 0.0;
             } else {
               Table shape(axes, std::vector<double>(cell_count(axes)));
               throw EvaluationError("division by zero at cell " + describe(shape.cell(c)));
             }
           });
  return Table(std::move(axes), std::move(out));
}

Table Table::sum_out(const std::set<std::string>& vars) const {
  std::vector<Axis> keep;
  for (const auto& a : axes_)
    if (!vars.count(a.name)) keep.push_back(a);
  Table result(keep, std::vector<double>(cell_count(keep), 0.0));
  auto dst = aligned_strides(axes_, result);
  odometer(axes_, {dst}, [&](std::size_t c, const std::vector<std::size_t>& off) { result.data_[off[0]] += data_[c]; });
  return result;
}

Table Table::marginal(const std::set<std::string>& keep) const {
  std::set<std::string> drop;
  for (const auto& a : axes_)
    if (!keep.count(a.name)) drop.insert(a.name);
  return sum_out(drop);
}

Table Table::slice(const Assignment& a) const {
  std::vector<Axis> keep;
  std::size_t base = 0;
  auto s = strides_of(axes_);
  std::vector<std::size_t> keep_strides;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    auto it = a.find(axes_[i].name);
    if (it == a.end()) {
      keep.push_back(axes_[i]);
      keep_strides.push_back(s[i]);
      continue;
    }
    if (it->second < 0 || it->second >= axes_[i].card)
      throw EvaluationError("value " + std::to_string(it->second) + " out of range for axis " + axes_[i].name);
    base += s[i] * static_cast<std::size_t>(it->second);
  }
  std::vector<double> out(cell_count(keep));
  odometer(keep, {keep_strides}, [&](std::size_t c, const std::vector<std::size_t>& off) { out[c] = data_[base + off[0]]; });
  return Table(std::move(keep), std::move(out));
}

Table Table::rename(const std::map<std::string, std::string>& names) const {
  std::vector<Axis> axes;
  for (const auto& a : axes_) {
    auto it = names.find(a.name);
    axes.push_back({it == names.end() ? a.name : it->second, a.card});
  }
  std::vector<Axis> sorted = axes;
  std::sort(sorted.begin(), sorted.end(), [](const Axis& a, const Axis& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].name == sorted[i - 1].name) throw ArgumentError("rename collides on axis " + sorted[i].name);
  // Source cells in source order, destination through aligned strides.
  std::vector<std::size_t> dst(axes.size());
  auto ds = strides_of(sorted);
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = 0; j < sorted.size(); ++j)
      if (sorted[j].name == axes[i].name) dst[i] = ds[j];
  std::vector<double> out(data_.size());
  odometer(axes_, {dst}, [&](std::size_t c, const std::vector<std::size_t>& off) { out[off[0]] = data_[c]; });
  return Table(std::move(sorted), std::move(out));
}

Table Table::scaled(double c) const {
  auto d = data_;
  for (auto& x : d) x *= c;
  return Table(axes_, std::move(d));
}

double Table::total() const {
  double s = 0.0;
  for (double x : data_) s += x;
  return s;
}

double max_abs_diff(const Table& reference, const Table& other) {
  for (const auto& a : other.axes())
    if (!reference.has_axis(a.name)) throw ArgumentError("table has unexpected axis " + a.name);
  double worst = 0.0;
  for (std::size_t c = 0; c < reference.size(); ++c)
    worst = std::max(worst, std::abs(reference.data()[c] - other.at(reference.cell(c))));
  return worst;
}

const Cpt& BayesNet::cpt(const VertexId& v) const {
  for (const auto& c : cpts)
    if (c.head == v) return c;
  throw LookupError("no CPT for " + v);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) + index); }

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  // Open interval (0, 1), fixed bit recipe so draws match across platforms.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }
  std::vector<double> dirichlet_mixed(int k) {
    std::vector<double> p(k);
    double s = 0.0;
    for (auto& x : p) s += (x = -std::log(uniform()));
    for (auto& x : p) x = (1.0 - kUniformMix) * x / s + kUniformMix / k;
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

std::vector<Axis> axes_for(const MDag& m, const std::vector<VertexId>& vs) {
  std::vector<Axis> axes;
  for (const auto& v : vs) axes.push_back({v, m.cardinality(v)});
  std::sort(axes.begin(), axes.end(), [](const Axis& a, const Axis& b) { return a.name < b.name; });
  return axes;
}

Cpt make_cpt(const MDag& m, const VertexId& v, const std::function<std::vector<double>(const Assignment&)>& row) {
  auto pa = m.graph().parents(v);
  std::vector<VertexId> tail(pa.begin(), pa.end());
  std::vector<VertexId> all = tail;
  all.push_back(v);
  Table t = Table::filled(axes_for(m, all), 0.0);
  Table rows = Table::filled(axes_for(m, tail), 0.0);
  std::vector<double> data(t.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Assignment a = rows.cell(r);
    auto p = row(a);
    for (int h = 0; h < m.cardinality(v); ++h) {
      a[v] = h;
      data[t.offset(a)] = p[h];
    }
  }
  return Cpt{v, tail, Table(t.axes(), std::move(data))};
}

int proxy_value(const MDag& m, const VertexId& proxy, const Assignment& a) {
  auto base = *m.base_of(proxy);
  return a.at(MDag::indicator_of(base)) == 1 ? a.at(MDag::counterfactual_of(base)) : m.base_cardinality(base);
}

Cpt proxy_cpt(const MDag& m, const VertexId& proxy) {
  return make_cpt(m, proxy, [&](const Assignment& a) {
    std::vector<double> p(m.cardinality(proxy), 0.0);
    p[proxy_value(m, proxy, a)] = 1.0;
    return p;
  });
}

// Calls visit(assignment, weight) for each cell over the non-proxy vertices
// with weight = product of their CPTs, proxies filled deterministically.
void for_each_world(const MDag& m, const BayesNet& bn, const std::set<VertexId>& skip,
                    const std::function<void(const Assignment&, double)>& visit) {
  std::vector<VertexId> free;
  for (const auto& v : m.graph().vertices())
    if (!m.has_role(v, VertexRole::Proxy)) free.push_back(v);
  auto axes = axes_for(m, free);
  auto proxies = m.proxies();
  std::vector<const Cpt*> cpts;
  for (const auto& v : free)
    if (!skip.count(v)) cpts.push_back(&bn.cpt(v));
  Table shape = Table::filled(axes, 0.0);
  for (std::size_t c = 0; c < shape.size(); ++c) {
    Assignment a = shape.cell(c);
    for (const auto& p : proxies) a[p] = proxy_value(m, p, a);
    double w = 1.0;
    for (const auto* cpt : cpts) w *= cpt->prob(a);
    visit(a, w);
  }
}

void guard(const MDag& m) {
  double cells = 1.0;
  for (const auto& v : m.graph().vertices()) cells *= m.cardinality(v);
  if (cells > kMaxCells)
    throw StateSpaceError("full law of " + m.name() + " has " + std::to_string(static_cast<long long>(cells)) +
                          " cells, above the limit of 1e7");
}

}  // namespace

BayesNet sample_bayes_net(const MDag& m, std::uint64_t seed) {
  guard(m);
  Rng rng(seed);
  BayesNet bn;
  for (const auto& v : m.graph().vertices()) {
    if (m.has_role(v, VertexRole::Proxy)) bn.cpts.push_back(proxy_cpt(m, v));
    else bn.cpts.push_back(make_cpt(m, v, [&](const Assignment&) { return rng.dirichlet_mixed(m.cardinality(v)); }));
  }
  return bn;
}

Table full_law(const MDag& m, const BayesNet& bn) {
  guard(m);
  Table t = Table::filled(axes_for(m, m.graph().vertices()), 0.0);
  std::vector<double> data(t.size(), 0.0);
  for_each_world(m, bn, {}, [&](const Assignment& a, double w) { data[t.offset(a)] = w; });
  return Table(t.axes(), std::move(data));
}

Table observed_law(const Table& full, const MDag& m) {
  auto vs = m.observed_law_vertices();
  return full.marginal({vs.begin(), vs.end()});
}

namespace {

std::map<std::string, std::string> counterfactual_names(const MDag& m) {
  std::map<std::string, std::string> names;
  for (const auto& b : m.missing()) names[MDag::counterfactual_of(b)] = b;
  return names;
}

}  // namespace

Table target_law(const Table& full, const MDag& m) {
  std::set<std::string> keep;
  for (const auto& v : m.counterfactuals()) keep.insert(v);
  for (const auto& v : m.observed()) keep.insert(v);
  return full.marginal(keep).rename(counterfactual_names(m));
}

Table full_target_law(const Table& full, const MDag& m) {
  std::set<std::string> keep;
  for (const auto& v : m.counterfactuals()) keep.insert(v);
  for (const auto& v : m.observed()) keep.insert(v);
  for (const auto& v : m.indicators()) keep.insert(v);
  return full.marginal(keep).rename(counterfactual_names(m));
}

Table counterfactual_truth(const MDag& m, const BayesNet& bn, const CounterfactualQuery& q) {
  auto y1 = MDag::counterfactual_of(q.outcome);
  Table t = Table::filled(axes_for(m, {y1, q.treatment}), 0.0);
  std::vector<double> data(t.size(), 0.0);
  for_each_world(m, bn, {q.treatment}, [&](const Assignment& a, double w) { data[t.offset(a)] += w; });
  return Table(t.axes(), std::move(data)).rename({{y1, q.outcome}});
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(const Table& obs) : obs_(obs) {}

  const Table& run(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    return memo_.emplace(e.id(), eval(e)).first->second;
  }

 private:
  int card(const std::string& v) const {
    if (!obs_.has_axis(v)) throw EvaluationError("variable " + v + " is not part of the observed law");
    return obs_.card(v);
  }

  Table eval(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Atom: {
        std::set<std::string> vars(e.head().begin(), e.head().end());
        std::set<std::string> given(e.given().begin(), e.given().end());
        vars.insert(given.begin(), given.end());
        for (const auto& v : vars) card(v);
        Assignment given_pins;
        for (const auto& [k, v] : e.values())
          if (given.count(k)) given_pins[k] = v;
        Table num = obs_.marginal(vars).slice(e.values());
        Table den = obs_.marginal(given).slice(given_pins);
        return num.divide(den);
      }
      case ExprKind::Constant:
        return Table::scalar(e.value());
      case ExprKind::Product: {
        Table t = Table::scalar(1.0);
        for (const auto& c : e.children()) t = t.product(run(c));
        return t;
      }
      case ExprKind::Ratio:
        return run(e.children()[0]).divide(run(e.children()[1]));
      case ExprKind::Sum: {
        Table body = run(e.children()[0]);
        std::set<std::string> present;
        double factor = 1.0;
        for (const auto& v : e.over()) {
          if (body.has_axis(v)) present.insert(v);
          else factor *= card(v);
        }
        Table out = body.sum_out(present);
        return factor == 1.0 ? out : out.scaled(factor);
      }
      case ExprKind::Case: {
        const Table& then = run(e.children()[0]);
        const Table& other = run(e.children()[1]);
        std::vector<Axis> axes = union_axes(then.axes(), other.axes());
        std::vector<Axis> when_axes;
        for (const auto& [k, v] : e.when()) when_axes.push_back({k, card(k)});
        axes = union_axes(axes, when_axes);
        Table shape(axes, std::vector<double>(cell_count(axes)));
        std::vector<double> out(shape.size());
        for (std::size_t c = 0; c < shape.size(); ++c) {
          Assignment a = shape.cell(c);
          bool match = std::all_of(e.when().begin(), e.when().end(),
                                   [&](const auto& kv) { return a.at(kv.first) == kv.second; });
          out[c] = match ? then.at(a) : other.at(a);
        }
        return Table(std::move(axes), std::move(out));
      }
    }
    throw EvaluationError("unknown expression node");
  }

  const Table& obs_;
  std::unordered_map<const Expr::Node*, Table> memo_;
};

}  // namespace

Table eval_functional(const Expr& f, const Table& obs) {
  Evaluator ev(obs);
  return ev.run(f);
}

bool ci_holds(const Table& law, const std::set<std::string>& x, const std::set<std::string>& y,
              const std::set<std::string>& z, double tol) {
  for (const auto& v : x)
    if (y.count(v) || z.count(v)) throw ArgumentError("conditional independence sets must be disjoint");
  for (const auto& v : y)
    if (z.count(v)) throw ArgumentError("conditional independence sets must be disjoint");
  std::set<std::string> xz = x, yz = y, xyz = x;
  xz.insert(z.begin(), z.end());
  yz.insert(z.begin(), z.end());
  xyz.insert(y.begin(), y.end());
  xyz.insert(z.begin(), z.end());
  Table pxyz = law.marginal(xyz), pxz = law.marginal(xz), pyz = law.marginal(yz), pz = law.marginal(z);
  for (std::size_t c = 0; c < pxyz.size(); ++c) {
    Assignment a = pxyz.cell(c);
    double d = pz.at(a);
    if (d <= 0.0) continue;
    if (std::abs(pxyz.data()[c] / d - (pxz.at(a) / d) * (pyz.at(a) / d)) >= tol) return false;
  }
  return true;
}

std::string model_hash(const MDag& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(m)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

VerificationReport verify_identification(const MDag& m, const IdResult& result, int trials, std::uint64_t seed) {
  if (!result.identified() || !result.functional)
    throw ArgumentError("verification needs an identified result carrying a functional");
  if (trials < 1) throw ArgumentError("trials must be positive");
  VerificationReport rep;
  rep.model = m.name();
  rep.model_hash = model_hash(m);
  rep.query = std::string(to_string(result.query));
  rep.seed = seed;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
    try {
      BayesNet bn = sample_bayes_net(m, s);
      Table full = full_law(m, bn);
      Table estimate = eval_functional(*result.functional, observed_law(full, m));
      Table truth = result.query == QueryKind::TargetLaw   ? target_law(full, m)
                    : result.query == QueryKind::FullLaw ? full_target_law(full, m)
                                                         : counterfactual_truth(m, bn, *result.counterfactual);
      double err = max_abs_diff(truth, estimate);
      rep.per_trial.push_back({s, err});
      if (t == 0 || err > rep.max_error) {
        rep.max_error = err;
        rep.worst_seed = s;
      }
    } catch (const EvaluationError& e) {
      throw EvaluationError("trial seed " + std::to_string(s) + ": " + e.what());
    }
  }
  return rep;
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& t : r.per_trial) per.push_back({{"seed", t.seed}, {"max_error", t.max_error}});
  return {{"schema_version", kSchemaVersion},
          {"model", r.model},
          {"model_hash", r.model_hash},
          {"generator", r.generator},
          {"query", r.query},
          {"seed", r.seed},
          {"trials", r.trials},
          {"per_trial", per},
          {"max_error", r.max_error},
          {"worst_seed", r.worst_seed}};
}

std::string law_to_csv(const Table& t) {
  std::ostringstream out;
  for (const auto& a : t.axes()) out << a.name << ",";
  out << "p\n";
  char buf[32];
  for (std::size_t c = 0; c < t.size(); ++c) {
    Assignment a = t.cell(c);
    for (const auto& ax : t.axes()) out << a.at(ax.name) << ",";
    std::snprintf(buf, sizeof buf, "%.17g", t.data()[c]);
    out << buf << "\n";
  }
  return out.str();
}

std::pair<Table, Table> self_censoring_counterexample(int k, std::uint64_t seed, std::optional<double> missing_rate) {
  if (k < 2 || k > 4) throw ArgumentError("cardinality must lie in [2, 4]");
  if (missing_rate && !(*missing_rate > 0.0 && *missing_rate < 1.0))
    throw ArgumentError("positivity requires 0 < p(R_X=0) < 1");
  std::vector<double> px, p0;
  double miss = 0.0;
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    px = rng.dirichlet_mixed(k);
    p0.assign(k, 0.0);
    for (int x = 0; x < k; ++x) p0[x] = missing_rate ? *missing_rate : rng.dirichlet_mixed(2)[0];
    miss = 0.0;
    for (int x = 0; x < k; ++x) miss += px[x] * p0[x];
    if (missing_rate || miss >= 0.15) break;
  }
  std::vector<double> q(k);
  for (int x = 0; x < k; ++x) q[x] = px[x] * p0[x] / miss;
  int j = static_cast<int>(std::min_element(q.begin(), q.end()) - q.begin());
  std::vector<double> qb(k, 0.05 / (k - 1));
  qb[j] = 0.95;

  auto build = [&](const std::vector<double>& r0) {
    Table t = Table::filled({{"X(1)", k}, {"R_X", 2}, {"X", k + 1}}, 0.0);
    std::vector<double> d(t.size(), 0.0);
    for (int x = 0; x < k; ++x) {
      d[t.offset({{"X(1)", x}, {"R_X", 1}, {"X", x}})] = px[x] * (1.0 - p0[x]);
      d[t.offset({{"X(1)", x}, {"R_X", 0}, {"X", k}})] = miss * r0[x];
    }
    return Table(t.axes(), std::move(d));
  };
  return {build(q), build(qb)};
}

BayesNet hiv_permutation_law(const MDag& m) {
  if (m.indicators() != std::vector<VertexId>{"R_X1", "R_X2"} || !m.graph().has_edge("R_X1", "R_X2") ||
      !m.graph().has_edge("X1", "R_X2"))
    throw ArgumentError("hand law expects the Permutation2 structure");
  for (const auto& b : m.missing())
    if (m.base_cardinality(b) != 2) throw ArgumentError("hand law expects binary variables");
  auto bern = [](double p1) { return std::vector<double>{1.0 - p1, p1}; };
  BayesNet bn;
  for (const auto& v : m.graph().vertices()) {
    if (m.has_role(v, VertexRole::Proxy)) {
      bn.cpts.push_back(proxy_cpt(m, v));
    } else if (v == "X1(1)") {
      bn.cpts.push_back(make_cpt(m, v, [&](const Assignment&) { return bern(0.4); }));
    } else if (v == "X2(1)") {
      bn.cpts.push_back(make_cpt(m, v, [&](const Assignment& a) { return bern(a.at("X1(1)") ? 0.7 : 0.2); }));
    } else if (v == "R_X1") {
      bn.cpts.push_back(make_cpt(m, v, [&](const Assignment& a) { return bern(a.at("X2(1)") ? 0.225 : 0.35); }));
    } else if (v == "R_X2") {
      bn.cpts.push_back(make_cpt(m, v, [&](const Assignment& a) {
        if (a.at("R_X1") == 0) return bern(0.20);
        return bern(a.at("X1") == 1 ? 0.50 : 0.60);
      }));
    } else {
      throw ArgumentError("unexpected vertex " + v + " for the hand law");
    }
  }
  return bn;
}

double fixed_propensity_deviation(const BayesNet& bn, const Table& full, const VertexId& r_k,
                                  const std::set<VertexId>& indicators) {
  if (indicators.count(r_k)) throw ArgumentError(r_k + " cannot be fixed and tested at once");
  Assignment ones;
  for (const auto& r : indicators) ones[r] = 1;
  Table q = full.slice(ones);
  for (const auto& r : indicators) q = q.divide(bn.cpt(r).table.slice(ones));
  const Cpt& cpt = bn.cpt(r_k);
  std::set<std::string> pa;
  for (const auto& p : cpt.tail)
    if (!indicators.count(p)) pa.insert(p);
  std::set<std::string> fam = pa;
  fam.insert(r_k);
  Table num = q.marginal(fam), den = q.marginal(pa);
  Table truth = cpt.table.slice(ones);
  double worst = 0.0;
  for (std::size_t c = 0; c < num.size(); ++c) {
    Assignment a = num.cell(c);
    double d = den.at(a);
    if (d <= 1e-300) continue;
    worst = std::max(worst, std::abs(num.data()[c] / d - truth.at(a)));
  }
  return worst;
}

}  // namespace mdagid
