#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace mdagid {

// Variable name -> state index.
using Assignment = std::map<std::string, int>;

enum class ExprKind { Atom, Constant, Product, Ratio, Sum, Case };

// Immutable expression over the observed law. Leaves are atoms
// p(head | given) where some variables may be pinned to values; the other
// variables stay free and become axes of the evaluated table.
class Expr {
 public:
  struct Node;

  static Expr atom(std::vector<std::string> head, std::vector<std::string> given = {}, Assignment values = {});
  static Expr constant(double value);
  static Expr product(std::vector<Expr> factors);
  static Expr ratio(Expr numerator, Expr denominator);
  static Expr sum(std::vector<std::string> over, Expr body);
  // `then` where every variable in `when` takes its listed value, else `otherwise`.
  static Expr select(Assignment when, Expr then, Expr otherwise);

  ExprKind kind() const;
  const std::vector<std::string>& head() const;
  const std::vector<std::string>& given() const;
  const Assignment& values() const;
  double value() const;
  const std::vector<Expr>& children() const;
  const std::vector<std::string>& over() const;
  const Assignment& when() const;

  const std::set<std::string>& free_variables() const;
  // Canonical parenthesized text; structural equality compares this form.
  const std::string& text() const;
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_ || a.text() == b.text(); }

 private:
  friend struct ExprFactory;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  ExprKind kind;
  std::vector<std::string> head;
  std::vector<std::string> given;
  Assignment values;  // pinned atom values, or the `when` map of a Case node
  double constant = 1.0;
  std::vector<Expr> children;  // Product factors; Ratio num/den; Sum body; Case then/else
  std::vector<std::string> over;
  std::set<std::string> free;
  std::string text;
};

Expr substitute(const Expr& e, const Assignment& values);
// Syntactic cleanup: flattens products, drops unit constants, merges nested
// sums, marginalizes atoms under sums, rewrites joint/marginal ratios as
// conditional atoms and cancels identical numerator/denominator factors.
Expr normalize(const Expr& e);

// Sums out every free variable of q outside keep.
Expr marginal_of(const Expr& q, const std::set<std::string>& keep);
// q(head | given) as a ratio of marginals; `extra` free variables are kept
// as indices and never summed.
Expr conditional_of(const Expr& q, const std::string& head, const std::set<std::string>& given,
                    const std::set<std::string>& extra = {});

std::set<std::string> pinned_variables(const Expr& e, int value);

nlohmann::json to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);

}  // namespace mdagid
