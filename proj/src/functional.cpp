#include "mdagid/functional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <unordered_map>

#include "mdagid/errors.hpp"

namespace mdagid {

namespace {

struct NodeImpl : Expr::Node {
  mutable std::once_flag text_once;
};

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string format_constant(double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string assignment_text(const Assignment& a) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : a) parts.push_back(k + "=" + std::to_string(v));
  return join(parts, ", ");
}

}  // namespace

// Raw node construction; no rewriting.
struct ExprFactory {
  static Expr make(Expr::Node&& n) {
    auto p = std::make_shared<NodeImpl>();
    static_cast<Expr::Node&>(*p) = std::move(n);
    return Expr(std::shared_ptr<const Expr::Node>(p, p.get()));
  }

  static Expr atom(std::vector<std::string> head, std::vector<std::string> given, Assignment values) {
    std::sort(head.begin(), head.end());
    std::sort(given.begin(), given.end());
    if (head.empty()) throw ArgumentError("atom with empty head");
    if (std::adjacent_find(head.begin(), head.end()) != head.end() ||
        std::adjacent_find(given.begin(), given.end()) != given.end())
      throw ArgumentError("atom repeats a variable");
    Expr::Node n;
    n.kind = ExprKind::Atom;
    for (const auto& h : head) {
      if (std::binary_search(given.begin(), given.end(), h))
        throw ArgumentError("variable " + h + " both conditioned and in the head of an atom");
      if (!values.count(h)) n.free.insert(h);
    }
    for (const auto& g : given)
      if (!values.count(g)) n.free.insert(g);
    for (const auto& [k, v] : values)
      if (!std::binary_search(head.begin(), head.end(), k) && !std::binary_search(given.begin(), given.end(), k))
        throw ArgumentError("pinned variable " + k + " not mentioned by atom");
    n.head = std::move(head);
    n.given = std::move(given);
    n.values = std::move(values);
    return make(std::move(n));
  }

  static Expr constant(double v) {
    Expr::Node n;
    n.kind = ExprKind::Constant;
    n.constant = v;
    return make(std::move(n));
  }

  static Expr nary(ExprKind kind, std::vector<Expr> children) {
    Expr::Node n;
    n.kind = kind;
    for (const auto& c : children) n.free.insert(c.free_variables().begin(), c.free_variables().end());
    n.children = std::move(children);
    return make(std::move(n));
  }

  static Expr sum(std::vector<std::string> over, Expr body) {
    std::sort(over.begin(), over.end());
    over.erase(std::unique(over.begin(), over.end()), over.end());
    Expr::Node n;
    n.kind = ExprKind::Sum;
    n.free = body.free_variables();
    for (const auto& v : over) n.free.erase(v);
    n.over = std::move(over);
    n.children = {std::move(body)};
    return make(std::move(n));
  }

  static Expr select(Assignment when, Expr then, Expr otherwise) {
    Expr::Node n;
    n.kind = ExprKind::Case;
    n.free = then.free_variables();
    n.free.insert(otherwise.free_variables().begin(), otherwise.free_variables().end());
    for (const auto& [k, v] : when) n.free.insert(k);
    n.values = std::move(when);
    n.children = {std::move(then), std::move(otherwise)};
    return make(std::move(n));
  }
};

ExprKind Expr::kind() const { return node_->kind; }
const std::vector<std::string>& Expr::head() const { return node_->head; }
const std::vector<std::string>& Expr::given() const { return node_->given; }
const Assignment& Expr::values() const { return node_->values; }
double Expr::value() const { return node_->constant; }
const std::vector<Expr>& Expr::children() const { return node_->children; }
const std::vector<std::string>& Expr::over() const { return node_->over; }
const Assignment& Expr::when() const { return node_->values; }
const std::set<std::string>& Expr::free_variables() const { return node_->free; }

const std::string& Expr::text() const {
  const auto* impl = static_cast<const NodeImpl*>(node_.get());
  std::call_once(impl->text_once, [impl] {
    auto& out = const_cast<std::string&>(impl->text);
    switch (impl->kind) {
      case ExprKind::Atom: {
        auto item = [&](const std::string& v) {
          auto it = impl->values.find(v);
          return it == impl->values.end() ? v : v + "=" + std::to_string(it->second);
        };
        std::vector<std::string> h;
        std::vector<std::string> g;
        for (const auto& v : impl->head) h.push_back(item(v));
        for (const auto& v : impl->given) g.push_back(item(v));
        out = "p(" + join(h, ", ") + (g.empty() ? "" : " | " + join(g, ", ")) + ")";
        break;
      }
      case ExprKind::Constant:
        out = format_constant(impl->constant);
        break;
      case ExprKind::Product: {
        std::vector<std::string> parts;
        for (const auto& c : impl->children) parts.push_back(c.text());
        out = "[" + join(parts, " * ") + "]";
        break;
      }
      case ExprKind::Ratio:
        out = "(" + impl->children[0].text() + " / " + impl->children[1].text() + ")";
        break;
      case ExprKind::Sum:
        out = "sum_{" + join(impl->over, ", ") + "} " + impl->children[0].text();
        break;
      case ExprKind::Case:
        out = "case{" + assignment_text(impl->values) + "}(" + impl->children[0].text() + " ; " +
              impl->children[1].text() + ")";
        break;
    }
  });
  return node_->text;
}

namespace {

std::vector<Expr> factors_of(const Expr& e) {
  if (e.kind() == ExprKind::Product) return e.children();
  if (e.kind() == ExprKind::Constant && e.value() == 1.0) return {};
  return {e};
}

bool is_joint_atom(const Expr& e) { return e.kind() == ExprKind::Atom && e.given().empty(); }

}  // namespace

Expr Expr::atom(std::vector<std::string> head, std::vector<std::string> given, Assignment values) {
  return ExprFactory::atom(std::move(head), std::move(given), std::move(values));
}

Expr Expr::constant(double value) { return ExprFactory::constant(value); }

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  double c = 1.0;
  for (auto& f : factors) {
    if (f.kind() == ExprKind::Product) {
      for (const auto& g : f.children()) {
        if (g.kind() == ExprKind::Constant)
          c *= g.value();
        else
          flat.push_back(g);
      }
    } else if (f.kind() == ExprKind::Constant) {
      c *= f.value();
    } else {
      flat.push_back(f);
    }
  }
  if (c != 1.0) flat.insert(flat.begin(), ExprFactory::constant(c));
  if (flat.empty()) return ExprFactory::constant(1.0);
  if (flat.size() == 1) return flat[0];
  return ExprFactory::nary(ExprKind::Product, std::move(flat));
}

Expr Expr::ratio(Expr numerator, Expr denominator) {
  if (denominator.kind() == ExprKind::Constant && denominator.value() == 1.0) return numerator;
  auto num = factors_of(numerator);
  auto den = factors_of(denominator);
  for (auto it = den.begin(); it != den.end();) {
    auto match = std::find_if(num.begin(), num.end(), [&](const Expr& n) { return n == *it; });
    if (match != num.end()) {
      num.erase(match);
      it = den.erase(it);
    } else {
      ++it;
    }
  }
  Expr n = product(num);
  if (den.empty()) return n;
  Expr d = product(den);
  if (is_joint_atom(n) && is_joint_atom(d)) {
    const auto& nh = n.head();
    const auto& dh = d.head();
    bool subset = dh.size() < nh.size() && std::includes(nh.begin(), nh.end(), dh.begin(), dh.end());
    if (subset) {
      bool same_pins = true;
      for (const auto& v : dh) {
        auto a = n.values().find(v);
        auto b = d.values().find(v);
        bool pa = a != n.values().end();
        bool pb = b != d.values().end();
        if (pa != pb || (pa && a->second != b->second)) same_pins = false;
      }
      if (same_pins) {
        std::vector<std::string> head;
        std::set_difference(nh.begin(), nh.end(), dh.begin(), dh.end(), std::back_inserter(head));
        return ExprFactory::atom(head, dh, n.values());
      }
    }
  }
  return ExprFactory::nary(ExprKind::Ratio, {n, d});
}

Expr Expr::sum(std::vector<std::string> over, Expr body) {
  std::sort(over.begin(), over.end());
  over.erase(std::unique(over.begin(), over.end()), over.end());
  if (over.empty()) return body;
  if (body.kind() == ExprKind::Sum) {
    std::vector<std::string> merged = body.over();
    merged.insert(merged.end(), over.begin(), over.end());
    return sum(merged, body.children()[0]);
  }
  if (body.kind() == ExprKind::Atom) {
    std::vector<std::string> head;
    std::vector<std::string> rest;
    for (const auto& v : over) {
      bool free_head = std::binary_search(body.head().begin(), body.head().end(), v) && !body.values().count(v);
      if (!free_head) rest.push_back(v);
    }
    for (const auto& h : body.head())
      if (!std::binary_search(over.begin(), over.end(), h) || body.values().count(h)) head.push_back(h);
    if (head.size() != body.head().size()) {
      Expr reduced = head.empty() ? ExprFactory::constant(1.0) : ExprFactory::atom(head, body.given(), [&] {
        Assignment a;
        for (const auto& [k, v] : body.values())
          if (std::find(head.begin(), head.end(), k) != head.end() ||
              std::binary_search(body.given().begin(), body.given().end(), k))
            a[k] = v;
        return a;
      }());
      if (rest.empty()) return reduced;
      return ExprFactory::sum(rest, reduced);
    }
  }
  return ExprFactory::sum(std::move(over), std::move(body));
}

Expr Expr::select(Assignment when, Expr then, Expr otherwise) {
  if (when.empty()) return then;
  return ExprFactory::select(std::move(when), std::move(then), std::move(otherwise));
}

namespace {

class Substituter {
 public:
  explicit Substituter(const Assignment& values) : values_(values) {}

  Expr run(const Expr& e) {
    bool touches = false;
    for (const auto& [k, v] : values_)
      if (e.free_variables().count(k)) {
        touches = true;
        break;
      }
    if (!touches) return e;
    auto it = cache_.find(e.id());
    if (it != cache_.end()) return it->second;
    Expr out = apply(e);
    cache_.emplace(e.id(), out);
    return out;
  }

 private:
  Expr apply(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Atom: {
        Assignment vals = e.values();
        for (const auto& [k, v] : values_)
          if (e.free_variables().count(k)) vals[k] = v;
        return Expr::atom(e.head(), e.given(), vals);
      }
      case ExprKind::Constant:
        return e;
      case ExprKind::Product: {
        std::vector<Expr> cs;
        for (const auto& c : e.children()) cs.push_back(run(c));
        return Expr::product(cs);
      }
      case ExprKind::Ratio:
        return Expr::ratio(run(e.children()[0]), run(e.children()[1]));
      case ExprKind::Sum: {
        Assignment inner;
        for (const auto& [k, v] : values_)
          if (std::find(e.over().begin(), e.over().end(), k) == e.over().end()) inner[k] = v;
        Substituter sub(inner);
        return Expr::sum(e.over(), sub.run(e.children()[0]));
      }
      case ExprKind::Case: {
        Assignment when;
        bool mismatch = false;
        for (const auto& [k, v] : e.when()) {
          auto it = values_.find(k);
          if (it == values_.end()) when[k] = v;
          else if (it->second != v) mismatch = true;
        }
        if (mismatch) return run(e.children()[1]);
        Expr then = run(e.children()[0]);
        if (when.empty()) return then;
        return Expr::select(when, then, run(e.children()[1]));
      }
    }
    return e;
  }

  const Assignment& values_;
  std::unordered_map<const Expr::Node*, Expr> cache_;
};

class Normalizer {
 public:
  Expr run(const Expr& e) {
    auto it = cache_.find(e.id());
    if (it != cache_.end()) return it->second;
    Expr out = apply(e);
    cache_.emplace(e.id(), out);
    return out;
  }

 private:
  Expr apply(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Atom:
      case ExprKind::Constant:
        return e;
      case ExprKind::Product: {
        std::vector<Expr> cs;
        for (const auto& c : e.children()) cs.push_back(run(c));
        return Expr::product(cs);
      }
      case ExprKind::Ratio:
        return Expr::ratio(run(e.children()[0]), run(e.children()[1]));
      case ExprKind::Sum:
        return Expr::sum(e.over(), run(e.children()[0]));
      case ExprKind::Case:
        return Expr::select(e.when(), run(e.children()[0]), run(e.children()[1]));
    }
    return e;
  }

  std::unordered_map<const Expr::Node*, Expr> cache_;
};

void collect_pins(const Expr& e, int value, std::set<std::string>& out, std::set<const Expr::Node*>& seen) {
  if (!seen.insert(e.id()).second) return;
  if (e.kind() == ExprKind::Atom) {
    for (const auto& [k, v] : e.values())
      if (v == value) out.insert(k);
    return;
  }
  for (const auto& c : e.children()) collect_pins(c, value, out, seen);
}

}  // namespace

Expr substitute(const Expr& e, const Assignment& values) {
  if (values.empty()) return e;
  Substituter s(values);
  return s.run(e);
}

Expr normalize(const Expr& e) {
  Normalizer n;
  return n.run(e);
}

Expr marginal_of(const Expr& q, const std::set<std::string>& keep) {
  std::vector<std::string> drop;
  for (const auto& v : q.free_variables())
    if (!keep.count(v)) drop.push_back(v);
  return Expr::sum(drop, q);
}

Expr conditional_of(const Expr& q, const std::string& head, const std::set<std::string>& given,
                    const std::set<std::string>& extra) {
  if (!q.free_variables().count(head)) throw ArgumentError("variable " + head + " is not free in the kernel");
  std::set<std::string> keep = given;
  keep.insert(extra.begin(), extra.end());
  keep.insert(head);
  Expr num = marginal_of(q, keep);
  return Expr::ratio(num, Expr::sum({head}, num));
}

std::set<std::string> pinned_variables(const Expr& e, int value) {
  std::set<std::string> out;
  std::set<const Expr::Node*> seen;
  collect_pins(e, value, out, seen);
  return out;
}

nlohmann::json to_json(const Expr& e) {
  using nlohmann::json;
  switch (e.kind()) {
    case ExprKind::Atom:
      return json{{"kind", "atom"}, {"head", e.head()}, {"given", e.given()}, {"values", e.values()}};
    case ExprKind::Constant:
      return json{{"kind", "constant"}, {"value", e.value()}};
    case ExprKind::Product: {
      json fs = json::array();
      for (const auto& c : e.children()) fs.push_back(to_json(c));
      return json{{"kind", "product"}, {"factors", fs}};
    }
    case ExprKind::Ratio:
      return json{{"kind", "ratio"}, {"numerator", to_json(e.children()[0])}, {"denominator", to_json(e.children()[1])}};
    case ExprKind::Sum:
      return json{{"kind", "sum"}, {"over", e.over()}, {"body", to_json(e.children()[0])}};
    case ExprKind::Case:
      return json{{"kind", "case"},
                  {"when", e.when()},
                  {"then", to_json(e.children()[0])},
                  {"else", to_json(e.children()[1])}};
  }
  return {};
}

Expr expr_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "atom")
      return ExprFactory::atom(j.at("head").get<std::vector<std::string>>(), j.at("given").get<std::vector<std::string>>(),
                               j.at("values").get<Assignment>());
    if (kind == "constant") return ExprFactory::constant(j.at("value").get<double>());
    if (kind == "product") {
      std::vector<Expr> fs;
      for (const auto& f : j.at("factors")) fs.push_back(expr_from_json(f));
      return ExprFactory::nary(ExprKind::Product, fs);
    }
    if (kind == "ratio")
      return ExprFactory::nary(ExprKind::Ratio, {expr_from_json(j.at("numerator")), expr_from_json(j.at("denominator"))});
    if (kind == "sum") return ExprFactory::sum(j.at("over").get<std::vector<std::string>>(), expr_from_json(j.at("body")));
    if (kind == "case")
      return ExprFactory::select(j.at("when").get<Assignment>(), expr_from_json(j.at("then")),
                                 expr_from_json(j.at("else")));
    throw ArgumentError("unknown expression kind '" + kind + "'");
  } catch (const nlohmann::json::exception& err) {
    throw ArgumentError(std::string("malformed expression JSON: ") + err.what());
  }
}

}  // namespace mdagid
