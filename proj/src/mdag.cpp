#include "mdagid/mdag.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "mdagid/errors.hpp"

namespace mdagid {

std::string_view to_string(VertexRole role) {
  switch (role) {
    case VertexRole::Counterfactual:
      return "Counterfactual";
    case VertexRole::Indicator:
      return "Indicator";
    case VertexRole::Proxy:
      return "Proxy";
    case VertexRole::Observed:
      return "Observed";
    case VertexRole::Hidden:
      return "Hidden";
  }
  return "?";
}

namespace {

bool valid_base_name(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

constexpr int kMaxCardinality = 4;

}  // namespace

VertexRole MDag::role(const VertexId& v) const {
  auto it = roles_.find(v);
  if (it == roles_.end()) throw LookupError("unknown vertex " + v);
  return it->second;
}

bool MDag::has_role(const VertexId& v, VertexRole r) const {
  auto it = roles_.find(v);
  return it != roles_.end() && it->second == r;
}

std::optional<std::string> MDag::base_of(const VertexId& v) const {
  auto it = base_.find(v);
  if (it == base_.end()) return std::nullopt;
  return it->second;
}

int MDag::base_cardinality(const std::string& base) const {
  auto it = cards_.find(base);
  if (it == cards_.end()) throw LookupError("unknown variable " + base);
  return it->second;
}

int MDag::cardinality(const VertexId& v) const {
  switch (role(v)) {
    case VertexRole::Indicator:
      return 2;
    case VertexRole::Proxy:
      return base_cardinality(base_.at(v)) + 1;
    case VertexRole::Counterfactual:
      return base_cardinality(base_.at(v));
    default:
      return base_cardinality(v);
  }
}

std::vector<VertexId> MDag::vertices_with(VertexRole r) const {
  std::vector<VertexId> out;
  for (const auto& [v, role] : roles_)
    if (role == r) out.push_back(v);
  return out;
}

std::vector<VertexId> MDag::indicators() const { return vertices_with(VertexRole::Indicator); }
std::vector<VertexId> MDag::counterfactuals() const { return vertices_with(VertexRole::Counterfactual); }
std::vector<VertexId> MDag::proxies() const { return vertices_with(VertexRole::Proxy); }

std::vector<VertexId> MDag::observed_law_vertices() const {
  std::vector<VertexId> out;
  for (const auto& [v, role] : roles_)
    if (role == VertexRole::Indicator || role == VertexRole::Proxy || role == VertexRole::Observed) out.push_back(v);
  return out;
}

bool MDag::is_deterministic(const Edge& e) const { return has_role(e.second, VertexRole::Proxy); }

bool MDag::proxies_have_children() const {
  for (const auto& p : proxies())
    if (!graph_.children(p).empty()) return true;
  return false;
}

std::map<VertexId, int> MDag::role_tiers() const {
  std::map<VertexId, int> tiers;
  for (const auto& [v, role] : roles_)
    tiers[v] = (role == VertexRole::Indicator || role == VertexRole::Proxy) ? 1 : 0;
  return tiers;
}

MDag build_mdag(const MDagSpec& spec) {
  MDag m;
  m.name_ = spec.name;
  m.missing_ = spec.missing;
  m.observed_ = spec.observed;
  m.hidden_ = spec.hidden;

  std::set<std::string> declared;
  auto declare = [&](const std::string& n) {
    if (!valid_base_name(n)) throw ModelError(ModelErrorKind::InvalidName, "invalid variable name '" + n + "'");
    if (!declared.insert(n).second)
      throw ModelError(ModelErrorKind::InvalidName, "variable " + n + " declared twice");
    int card = 2;
    if (auto it = spec.cardinalities.find(n); it != spec.cardinalities.end()) card = it->second;
    if (card < 2 || card > kMaxCardinality)
      throw ModelError(ModelErrorKind::InvalidName, "cardinality of " + n + " must lie in [2, " +
                                                        std::to_string(kMaxCardinality) + "]");
    m.cards_[n] = card;
  };
  for (const auto& n : spec.missing) declare(n);
  for (const auto& n : spec.observed) declare(n);
  for (const auto& n : spec.hidden) declare(n);
  for (const auto& [n, c] : spec.cardinalities)
    if (!declared.count(n)) throw ModelError(ModelErrorKind::UnknownVertex, "cardinality given for undeclared " + n);

  auto add_vertex = [&](const VertexId& v, VertexRole r) {
    if (!m.roles_.emplace(v, r).second)
      throw ModelError(ModelErrorKind::InvalidName, "vertex name " + v + " is generated twice");
  };
  for (const auto& n : spec.missing) {
    add_vertex(MDag::counterfactual_of(n), VertexRole::Counterfactual);
    add_vertex(MDag::indicator_of(n), VertexRole::Indicator);
    add_vertex(MDag::proxy_of(n), VertexRole::Proxy);
    m.base_[MDag::counterfactual_of(n)] = n;
    m.base_[MDag::indicator_of(n)] = n;
    m.base_[MDag::proxy_of(n)] = n;
  }
  for (const auto& n : spec.observed) add_vertex(n, VertexRole::Observed);
  for (const auto& n : spec.hidden) add_vertex(n, VertexRole::Hidden);

  std::set<Edge> seen;
  for (const auto& e : spec.edges) {
    const auto& [a, b] = e;
    if (!m.roles_.count(a) || !m.roles_.count(b))
      throw ModelError(ModelErrorKind::UnknownVertex,
                       "edge " + edge_text(e) + " names unknown vertex " + (m.roles_.count(a) ? b : a));
    if (a == b) throw ModelError(ModelErrorKind::Acyclicity, "self-loop " + edge_text(e));
    VertexRole ra = m.roles_.at(a);
    VertexRole rb = m.roles_.at(b);
    if (rb == VertexRole::Proxy) {
      const auto& base = m.base_.at(b);
      bool implicit = (a == MDag::counterfactual_of(base) || a == MDag::indicator_of(base));
      if (implicit) continue;
      throw ModelError(ModelErrorKind::RestrictionA,
                       "restriction (a) violated by edge " + edge_text(e) + ": proxy " + b +
                           " has exactly the parents " + MDag::counterfactual_of(base) + " and " +
                           MDag::indicator_of(base));
    }
    if ((ra == VertexRole::Indicator || ra == VertexRole::Proxy) &&
        (rb == VertexRole::Counterfactual || rb == VertexRole::Observed || rb == VertexRole::Hidden))
      throw ModelError(ModelErrorKind::RestrictionB,
                       "restriction (b) violated by edge " + edge_text(e) +
                           ": indicators and proxies cannot have directed paths into counterfactual, observed or "
                           "hidden variables");
    if (ra == VertexRole::Proxy && m.base_.count(b) && m.base_.at(b) == m.base_.at(a))
      throw ModelError(ModelErrorKind::RestrictionA,
                       "edge " + edge_text(e) + ": a proxy may only point to indicators of other variables");
    if (!seen.insert(e).second) continue;
    m.prob_edges_.push_back(e);
  }
  std::sort(m.prob_edges_.begin(), m.prob_edges_.end());

  std::vector<Edge> all = m.prob_edges_;
  for (const auto& n : spec.missing) {
    all.emplace_back(MDag::counterfactual_of(n), MDag::proxy_of(n));
    all.emplace_back(MDag::indicator_of(n), MDag::proxy_of(n));
  }
  std::vector<VertexId> names;
  for (const auto& [v, r] : m.roles_) names.push_back(v);
  try {
    m.graph_ = Digraph(names, all);
  } catch (const CycleError& err) {
    throw ModelError(ModelErrorKind::Acyclicity, err.what());
  }
  return m;
}

MDag build_mdag(const std::vector<std::string>& missing, const std::vector<std::string>& observed,
                const std::vector<std::string>& hidden, const std::vector<Edge>& prob_edges,
                const std::map<std::string, int>& cardinalities) {
  MDagSpec spec;
  spec.missing = missing;
  spec.observed = observed;
  spec.hidden = hidden;
  spec.edges = prob_edges;
  spec.cardinalities = cardinalities;
  return build_mdag(spec);
}

namespace {

struct Token {
  std::string text;
  int column;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line.compare(i, 2, "->") == 0) {
      out.push_back({"->", static_cast<int>(i) + 1});
      i += 2;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line.compare(j, 2, "->") != 0) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

}  // namespace

MDag parse_mdag(std::string_view text, const std::string& name) {
  MDagSpec spec;
  spec.name = name;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool edges_started = false;
  std::map<Edge, int> edge_lines;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const auto& head = tokens[0];
    if (head.text == "missing" || head.text == "observed" || head.text == "hidden") {
      if (edges_started) throw ParseError(line_no, head.column, "declarations must precede edges");
      if (tokens.size() < 2) throw ParseError(line_no, head.column, "expected a variable name");
      const auto& var = tokens[1];
      if (!valid_base_name(var.text)) throw ParseError(line_no, var.column, "invalid variable name '" + var.text + "'");
      if (tokens.size() > 3) throw ParseError(line_no, tokens[3].column, "unexpected token '" + tokens[3].text + "'");
      if (tokens.size() == 3) {
        std::string opt = tokens[2].text;
        if (opt.size() > 2 && opt.front() == '[' && opt.back() == ']') opt = opt.substr(1, opt.size() - 2);
        if (opt.rfind("card=", 0) != 0)
          throw ParseError(line_no, tokens[2].column, "expected card=k, found '" + tokens[2].text + "'");
        std::string digits = opt.substr(5);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) || digits.size() > 3)
          throw ParseError(line_no, tokens[2].column + 5, "cardinality must be a positive integer");
        spec.cardinalities[var.text] = std::stoi(digits);
      }
      if (head.text == "missing") spec.missing.push_back(var.text);
      else if (head.text == "observed") spec.observed.push_back(var.text);
      else spec.hidden.push_back(var.text);
    } else if (head.text == "edge") {
      edges_started = true;
      if (tokens.size() != 4 || tokens[2].text != "->") {
        int col = tokens.size() > 2 ? tokens[2].column : head.column;
        throw ParseError(line_no, col, "expected 'edge A -> B'");
      }
      Edge e{tokens[1].text, tokens[3].text};
      edge_lines.emplace(e, line_no);
      spec.edges.push_back(e);
    } else if (head.text == "monotone") {
      throw ModelError(ModelErrorKind::Unsupported,
                       "line " + std::to_string(line_no) + ": monotone missingness cannot be expressed as an m-DAG");
    } else {
      throw ParseError(line_no, head.column, "unknown statement '" + head.text + "'");
    }
  }
  try {
    return build_mdag(spec);
  } catch (const ModelError& err) {
    std::string msg = err.what();
    for (const auto& [e, line] : edge_lines)
      if (msg.find(edge_text(e)) != std::string::npos) {
        msg = "line " + std::to_string(line) + ": " + msg;
        break;
      }
    throw ModelError(err.kind(), msg);
  }
}

std::string to_text(const MDag& m) {
  std::ostringstream out;
  auto decl = [&](const char* kw, const std::vector<std::string>& names) {
    for (const auto& n : names) {
      out << kw << ' ' << n;
      if (m.base_cardinality(n) != 2) out << " card=" << m.base_cardinality(n);
      out << '\n';
    }
  };
  decl("missing", m.missing());
  decl("observed", m.observed());
  decl("hidden", m.hidden());
  for (const auto& e : m.probabilistic_edges()) out << "edge " << e.first << " -> " << e.second << '\n';
  return out.str();
}

TopoOrder layered_order(const MDag& m, const Digraph& g) {
  auto tiers = m.role_tiers();
  std::map<VertexId, int> local;
  for (const auto& v : g.vertices()) {
    auto it = tiers.find(v);
    local[v] = it == tiers.end() ? 0 : it->second;
  }
  return topological_order(g, local);
}

std::string_view to_string(MechanismClass c) {
  switch (c) {
    case MechanismClass::MCAR:
      return "MCAR";
    case MechanismClass::MAR:
      return "MAR";
    case MechanismClass::MNAR:
      return "MNAR";
  }
  return "?";
}

MechanismClass classify_mechanism(const MDag& m) {
  bool any_parent = false;
  for (const auto& r : m.indicators()) {
    for (const auto& p : m.graph().parents(r)) {
      any_parent = true;
      VertexRole role = m.role(p);
      if (role == VertexRole::Counterfactual || role == VertexRole::Hidden) return MechanismClass::MNAR;
    }
  }
  return any_parent ? MechanismClass::MAR : MechanismClass::MCAR;
}

std::string_view to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::SelfCensoring:
      return "SelfCensoring";
    case WitnessKind::Colluder:
      return "Colluder";
    case WitnessKind::CrissCross:
      return "CrissCross";
    case WitnessKind::ColludingPath:
      return "ColludingPath";
  }
  return "?";
}

WitnessKind witness_kind_from_string(std::string_view s) {
  for (auto k : {WitnessKind::SelfCensoring, WitnessKind::Colluder, WitnessKind::CrissCross, WitnessKind::ColludingPath})
    if (to_string(k) == s) return k;
  throw LookupError("unknown witness kind " + std::string(s));
}

std::string StructureWitness::describe() const {
  std::string out(to_string(kind));
  out += ":";
  for (std::size_t i = 0; i < edges.size(); ++i) out += (i ? ", " : " ") + edge_text(edges[i]);
  return out;
}

std::vector<StructureWitness> detect_self_censoring(const MDag& m) {
  std::vector<StructureWitness> out;
  for (const auto& base : m.missing()) {
    auto c = MDag::counterfactual_of(base);
    auto r = MDag::indicator_of(base);
    if (m.graph().has_edge(c, r)) out.push_back({WitnessKind::SelfCensoring, {c, r}, {{c, r}}});
  }
  return out;
}

std::vector<StructureWitness> detect_colluders(const MDag& m) {
  std::vector<StructureWitness> out;
  const auto& g = m.graph();
  for (const auto& bi : m.missing())
    for (const auto& bj : m.missing()) {
      if (bi == bj) continue;
      auto li = MDag::counterfactual_of(bi);
      auto ri = MDag::indicator_of(bi);
      auto rj = MDag::indicator_of(bj);
      if (g.has_edge(li, rj) && g.has_edge(ri, rj))
        out.push_back({WitnessKind::Colluder, {li, rj, ri}, {{li, rj}, {ri, rj}}});
    }
  return out;
}

std::vector<StructureWitness> detect_criss_cross(const MDag& m) {
  std::vector<StructureWitness> out;
  const auto& g = m.graph();
  for (const auto& bi : m.missing())
    for (const auto& bj : m.missing()) {
      if (bi == bj) continue;
      auto li = MDag::counterfactual_of(bi);
      auto lj = MDag::counterfactual_of(bj);
      auto ri = MDag::indicator_of(bi);
      auto rj = MDag::indicator_of(bj);
      if (!(g.has_edge(li, lj) || g.has_edge(lj, li))) continue;
      if (g.has_edge(li, rj) && g.has_edge(ri, rj) && g.has_edge(lj, ri)) {
        Edge adj = g.has_edge(li, lj) ? Edge{li, lj} : Edge{lj, li};
        out.push_back({WitnessKind::CrissCross, {li, lj, ri, rj}, {adj, {li, rj}, {ri, rj}, {lj, ri}}});
      }
    }
  return out;
}

std::vector<StructureWitness> detect_colluding_paths(const MDag& m) {
  std::vector<StructureWitness> out;
  const auto& g = m.graph();
  auto collider_ok = [&](const VertexId& v) {
    VertexRole r = m.role(v);
    return r == VertexRole::Counterfactual || r == VertexRole::Indicator || r == VertexRole::Observed;
  };
  for (const auto& base : m.missing()) {
    const auto start = MDag::counterfactual_of(base);
    const auto target = MDag::indicator_of(base);
    std::vector<VertexId> path{start};
    std::vector<Edge> edges;
    std::set<VertexId> on_path{start};
    // `into_last`: the last edge has its arrowhead at the current endpoint.
    std::function<void(bool)> extend = [&](bool into_last) {
      const VertexId v = path.back();
      std::vector<std::pair<VertexId, bool>> steps;  // neighbour, edge points into v
      for (const auto& p : g.parents(v)) steps.emplace_back(p, true);
      for (const auto& c : g.children(v)) steps.emplace_back(c, false);
      std::sort(steps.begin(), steps.end());
      for (const auto& [w, into_v] : steps) {
        if (on_path.count(w)) continue;
        if (path.size() > 1) {
          bool collider = into_last && into_v;
          if (collider ? !collider_ok(v) : m.role(v) != VertexRole::Hidden) continue;
        }
        path.push_back(w);
        edges.push_back(into_v ? Edge{w, v} : Edge{v, w});
        if (w == target) {
          out.push_back({WitnessKind::ColludingPath, path, edges});
        } else {
          on_path.insert(w);
          extend(!into_v);
          on_path.erase(w);
        }
        path.pop_back();
        edges.pop_back();
      }
    };
    extend(false);
  }
  return out;
}

std::vector<VertexId> path_colliders(const MDag& m, const StructureWitness& w) {
  std::vector<VertexId> out;
  const auto& g = m.graph();
  for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) {
    const auto& v = w.vertices[i];
    if (g.has_edge(w.vertices[i - 1], v) && g.has_edge(w.vertices[i + 1], v)) out.push_back(v);
  }
  return out;
}

namespace {

struct CanonEntry {
  CanonicalModel id;
  const char* name;
  std::vector<std::string> missing;
  std::vector<std::string> observed;
  std::vector<std::string> hidden;
  std::vector<Edge> edges;
};

const std::vector<CanonEntry>& canon_table() {
  static const std::vector<CanonEntry> table = {
      {CanonicalModel::Permutation2, "Permutation2", {"X1", "X2"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X2(1)", "R_X1"}, {"R_X1", "R_X2"}, {"X1", "R_X2"}}},
      {CanonicalModel::BlockParallel2, "BlockParallel2", {"X1", "X2"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X2(1)", "R_X1"}, {"X1(1)", "R_X2"}}},
      {CanonicalModel::BlockSequential2, "BlockSequential2", {"X1", "X2"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X1(1)", "R_X2"}, {"R_X1", "R_X2"}}},
      {CanonicalModel::MarExample2, "MarExample2", {"X1", "X2"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"R_X1", "R_X2"}, {"X1", "R_X2"}}},
      {CanonicalModel::SeqPar3, "SeqPar3", {"X1", "X2", "X3"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X2(1)", "X3(1)"}, {"X1(1)", "X3(1)"}, {"X2(1)", "R_X1"}, {"X2(1)", "R_X3"},
        {"X3(1)", "R_X1"}, {"X3(1)", "R_X2"}, {"R_X1", "R_X2"}, {"R_X1", "R_X3"}}},
      {CanonicalModel::PartialOrder3, "PartialOrder3", {"X1", "X2", "X3"}, {}, {},
       {{"X2(1)", "X3(1)"}, {"X1(1)", "R_X2"}, {"X2(1)", "R_X1"}, {"X2(1)", "R_X3"}, {"X3(1)", "R_X2"},
        {"R_X1", "R_X2"}, {"R_X1", "R_X3"}}},
      {CanonicalModel::OutsideR4, "OutsideR4", {"X1", "X2", "X4"}, {"X3"}, {},
       {{"X1(1)", "X3"}, {"X2(1)", "X3"}, {"X3", "X4(1)"}, {"X4(1)", "R_X2"}, {"X4(1)", "R_X1"}, {"R_X2", "R_X1"},
        {"X3", "R_X4"}, {"X1(1)", "R_X2"}, {"X2(1)", "R_X1"}}},
      {CanonicalModel::OddsRatio3, "OddsRatio3", {"X1", "X2", "X3"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X1(1)", "X3(1)"}, {"X2(1)", "X3(1)"}, {"R_X3", "R_X2"}, {"R_X2", "R_X1"},
        {"X1(1)", "R_X2"}, {"X1(1)", "R_X3"}, {"X3(1)", "R_X1"}}},
      {CanonicalModel::OddsRatio3Equiv, "OddsRatio3Equiv", {"X1", "X2", "X3"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X1(1)", "X3(1)"}, {"X2(1)", "X3(1)"}, {"R_X2", "R_X3"}, {"R_X2", "R_X1"},
        {"X1(1)", "R_X2"}, {"X1(1)", "R_X3"}, {"X3(1)", "R_X1"}}},
      {CanonicalModel::HiddenSix, "HiddenSix", {"X1", "X2", "X3", "X4"}, {"X5", "X6"}, {"U1", "U2", "U3"},
       {{"X1(1)", "X5"}, {"X3(1)", "X6"}, {"X5", "X2(1)"}, {"X6", "X4(1)"}, {"X3(1)", "R_X1"}, {"X6", "R_X1"},
        {"X4(1)", "R_X2"}, {"X6", "R_X2"}, {"X1(1)", "R_X3"}, {"X5", "R_X3"}, {"X2(1)", "R_X4"}, {"X5", "R_X4"},
        {"U1", "R_X3"}, {"U1", "R_X4"}, {"U1", "X5"}, {"U3", "X1(1)"}, {"U3", "X2(1)"}, {"U3", "X3(1)"},
        {"U3", "X4(1)"}, {"U2", "X6"}, {"U2", "R_X1"}, {"U2", "R_X2"}}},
      {CanonicalModel::SelfCensor1, "SelfCensor1", {"X"}, {}, {}, {{"X(1)", "R_X"}}},
      {CanonicalModel::CrissCross2, "CrissCross2", {"X1", "X2"}, {}, {},
       {{"X1(1)", "X2(1)"}, {"X1(1)", "R_X2"}, {"R_X1", "R_X2"}, {"X2(1)", "R_X1"}}},
      {CanonicalModel::ConfoundedOutcome, "ConfoundedOutcome", {"Y"}, {"X", "A"}, {"U1", "U2"},
       {{"X", "A"}, {"A", "Y(1)"}, {"U1", "X"}, {"U1", "Y(1)"}, {"U2", "R_Y"}, {"U2", "X"}}},
  };
  return table;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<CanonicalModel> canonical_models() {
  std::vector<CanonicalModel> out;
  for (const auto& e : canon_table()) out.push_back(e.id);
  return out;
}

std::string_view to_string(CanonicalModel c) {
  for (const auto& e : canon_table())
    if (e.id == c) return e.name;
  return "?";
}

CanonicalModel canonical_from_string(std::string_view name) {
  for (const auto& e : canon_table())
    if (lower(e.name) == lower(name)) return e.id;
  throw LookupError("unknown canonical model '" + std::string(name) + "'");
}

MDag canonical_model(CanonicalModel c) {
  for (const auto& e : canon_table())
    if (e.id == c) {
      MDagSpec spec;
      spec.name = e.name;
      spec.missing = e.missing;
      spec.observed = e.observed;
      spec.hidden = e.hidden;
      spec.edges = e.edges;
      return build_mdag(spec);
    }
  throw LookupError("unknown canonical model");
}

MDag canonical_model(std::string_view name) { return canonical_model(canonical_from_string(name)); }

}  // namespace mdagid
