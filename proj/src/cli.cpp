#include "mdagid/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdagid/errors.hpp"
#include "mdagid/id_engine.hpp"
#include "mdagid/mdag.hpp"
#include "mdagid/oracle.hpp"

namespace mdagid {

namespace {

using nlohmann::json;

// Composed functionals are checked at this tolerance.
constexpr double kVerifyTolerance = 1e-8;

struct Options {
  std::string format = "text";
  std::uint64_t seed = 0;
  int trials = 100;
  int budget_depth = -1;
  std::size_t budget_frontier = 50000;
  std::string out_path;
  bool strict = false;
  std::string query = "target";
  std::string treatment;
  std::string outcome;
  std::string trace;
  std::string model;
  std::vector<std::string> dsep_terms;
  std::string canon_name;
};

MDag load_model(const std::string& arg) {
  if (arg.rfind("canon:", 0) == 0) return canonical_model(arg.substr(6));
  std::ifstream in(arg, std::ios::binary);
  if (!in) throw ArgumentError("cannot read model file " + arg);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mdag(buf.str(), std::filesystem::path(arg).stem().string());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_atomic(const std::string& path, const std::string& text) {
  std::filesystem::path target(path);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ArgumentError("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) throw ArgumentError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ArgumentError("cannot move output into place at " + path + ": " + ec.message());
  }
}

json witnesses_json(const std::vector<StructureWitness>& ws) {
  json a = json::array();
  for (const auto& w : ws) {
    json edges = json::array();
    for (const auto& [x, y] : w.edges) edges.push_back({x, y});
    a.push_back({{"kind", std::string(to_string(w.kind))}, {"vertices", w.vertices}, {"edges", edges}});
  }
  return a;
}

IdResult run_query(const MDag& m, const Options& o) {
  SearchBudget budget{o.budget_depth, o.budget_frontier};
  if (o.query == "target") return identify_target_law(m, budget);
  if (o.query == "full") return identify_full_law(m);
  if (o.treatment.empty() || o.outcome.empty()) throw ArgumentError("--query outcome needs --treatment and --outcome");
  return identify_counterfactual_outcome(m, {o.treatment, o.outcome});
}

struct Output {
  std::string text;
  int code = 0;
};

Output cmd_analyze(const MDag& m, const Options& o) {
  auto sc = detect_self_censoring(m);
  auto col = detect_colluders(m);
  auto cc = detect_criss_cross(m);
  auto paths = detect_colluding_paths(m);
  auto cls = classify_mechanism(m);
  if (o.format == "json") {
    json j{{"schema_version", kSchemaVersion},
           {"model", m.name()},
           {"class", std::string(to_string(cls))},
           {"self_censoring", witnesses_json(sc)},
           {"colluders", witnesses_json(col)},
           {"criss_cross", witnesses_json(cc)},
           {"colluding_paths", witnesses_json(paths)}};
    return {j.dump(2) + "\n"};
  }
  std::ostringstream s;
  s << "model: " << m.name() << "\nclass: " << to_string(cls) << "\n";
  auto section = [&](const char* title, const std::vector<StructureWitness>& ws) {
    s << title << ": " << (ws.empty() ? "none" : "") << "\n";
    for (const auto& w : ws) s << "  " << w.describe() << "\n";
  };
  section("self-censoring", sc);
  section("colluders", col);
  section("criss-cross", cc);
  section("colluding paths", paths);
  return {s.str()};
}

Output cmd_identify(const MDag& m, const Options& o) {
  IdResult r = run_query(m, o);
  std::optional<SequentialTrace> trace;
  if (!o.trace.empty()) trace = trace_sequential(m, split_list(o.trace));
  Output out;
  if (o.format == "json") {
    json j = to_json(r);
    if (trace)
      j["sequential_trace"] = {{"events", trace->events},
                               {"completed", trace->completed},
                               {"blocked", trace->blocked},
                               {"blocked_vertex", trace->blocked_vertex}};
    out.text = j.dump(2) + "\n";
  } else {
    out.text = format_text(r);
    if (trace) {
      out.text += "sequential trace:\n";
      for (const auto& e : trace->events) out.text += "  " + e + "\n";
      out.text += trace->completed ? "  completed\n" : "  stopped\n";
    }
  }
  if (o.strict && !r.identified()) out.code = 1;
  return out;
}

Output cmd_verify(const MDag& m, const Options& o) {
  IdResult r = run_query(m, o);
  if (!r.identified() || !r.functional) {
    std::string msg = "model " + m.name() + ": " + std::string(to_string(r.verdict)) + ", nothing to verify\n";
    if (o.format == "json") {
      json j{{"schema_version", kSchemaVersion}, {"model", m.name()}, {"verdict", std::string(to_string(r.verdict))},
             {"passed", false}};
      return {j.dump(2) + "\n", 1};
    }
    return {msg, 1};
  }
  auto rep = verify_identification(m, r, o.trials, o.seed);
  bool pass = rep.max_error < kVerifyTolerance;
  if (o.format == "json") {
    json j = to_json(rep);
    j["tolerance"] = kVerifyTolerance;
    j["passed"] = pass;
    j["functional_text"] = r.functional->text();
    return {j.dump(2) + "\n", pass ? 0 : 1};
  }
  std::ostringstream s;
  char err[32];
  std::snprintf(err, sizeof err, "%.3e", rep.max_error);
  s << "model: " << rep.model << " (" << rep.model_hash << ")\n"
    << "query: " << rep.query << "\n"
    << "functional: " << r.functional->text() << "\n"
    << "generator: " << rep.generator << ", seed " << rep.seed << ", trials " << rep.trials << "\n"
    << "max error: " << err << " (worst seed " << rep.worst_seed << ")\n"
    << (pass ? "PASS" : "FAIL") << " at tolerance 1e-8\n";
  return {s.str(), pass ? 0 : 1};
}

Output cmd_dsep(const MDag& m, const Options& o) {
  std::vector<std::string> before, after;
  bool bar = false;
  for (const auto& t : o.dsep_terms) {
    for (const auto& piece : split_list(t)) {
      std::string rest = piece;
      while (!rest.empty()) {
        auto p = rest.find('|');
        std::string head = rest.substr(0, p);
        if (!head.empty()) (bar ? after : before).push_back(head);
        if (p == std::string::npos) break;
        if (bar) throw ArgumentError("dsep takes a single '|'");
        bar = true;
        rest = rest.substr(p + 1);
      }
    }
  }
  if (before.size() != 2) throw ArgumentError("dsep expects: X Y [| Z...]");
  VertexSet x{before[0]}, y{before[1]}, z(after.begin(), after.end());
  for (const auto& v : {before[0], before[1]})
    if (!m.graph().contains(v)) throw ArgumentError("unknown vertex " + v);
  for (const auto& v : z)
    if (!m.graph().contains(v)) throw ArgumentError("unknown vertex " + v);
  bool sep = d_separated(m.graph(), x, y, z);
  auto path = sep ? std::nullopt : active_path(m.graph(), x, y, z);
  std::string zs;
  for (const auto& v : z) zs += (zs.empty() ? "" : ", ") + v;
  if (o.format == "json") {
    json j{{"schema_version", kSchemaVersion}, {"model", m.name()}, {"x", before[0]}, {"y", before[1]},
           {"z", std::vector<std::string>(z.begin(), z.end())}, {"separated", sep},
           {"active_path", path ? json(*path) : json(nullptr)}};
    return {j.dump(2) + "\n"};
  }
  std::ostringstream s;
  s << (sep ? "true" : "false") << "\n";
  if (sep) {
    s << "every path between " << before[0] << " and " << before[1] << " is blocked by {" << zs << "}\n";
  } else if (path) {
    s << "active path:";
    for (std::size_t i = 0; i < path->size(); ++i) s << (i ? " - " : " ") << (*path)[i];
    s << "\n";
  }
  return {s.str()};
}

Output cmd_classify(const MDag& m, const Options& o) {
  auto cls = std::string(to_string(classify_mechanism(m)));
  if (o.format == "json") return {json{{"schema_version", kSchemaVersion}, {"model", m.name()}, {"class", cls}}.dump(2) + "\n"};
  return {cls + "\n"};
}

Output cmd_canon(const Options& o) {
  if (o.canon_name.empty()) {
    std::string s;
    for (auto c : canonical_models()) s += std::string(to_string(c)) + "\n";
    return {s};
  }
  return {to_text(canonical_model(o.canon_name))};
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app->add_option("--seed", o.seed, "Seed for all randomness");
  app->add_option("--trials", o.trials, "Verification trials")->check(CLI::PositiveNumber);
  app->add_option("--budget-depth", o.budget_depth, "Search depth limit (default 2K+2)");
  app->add_option("--budget-frontier", o.budget_frontier, "Search state limit")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out_path, "Write the report to this path");
  app->add_flag("--strict", o.strict, "Exit 1 on verdicts other than Identified");
}

void add_query(CLI::App* app, Options& o) {
  app->add_option("--query", o.query, "target, full or outcome")->check(CLI::IsMember({"target", "full", "outcome"}));
  app->add_option("--treatment", o.treatment, "Treatment for --query outcome");
  app->add_option("--outcome", o.outcome, "Missing outcome for --query outcome");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Identification of missing-data models given as m-DAGs", "mdagid"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Mechanism class and structure witnesses");
  auto* identify = app.add_subcommand("identify", "Identify the target law, full law or a counterfactual mean");
  auto* verify = app.add_subcommand("verify", "Check the identified functional against sampled laws");
  auto* dsep = app.add_subcommand("dsep", "d-separation test: X Y | Z");
  auto* classify = app.add_subcommand("classify", "MCAR, MAR or MNAR");
  auto* canon = app.add_subcommand("canon", "Print a built-in model, or list them");

  for (auto* sc : {analyze, identify, verify, dsep, classify}) {
    add_common(sc, o);
    sc->add_option("model", o.model, "Model file or canon:<Name>")->required();
  }
  add_common(canon, o);
  canon->add_option("name", o.canon_name, "Built-in model name");
  add_query(identify, o);
  add_query(verify, o);
  identify->add_option("--trace-sequential", o.trace, "Comma-separated indicator order to fix one at a time");
  dsep->add_option("terms", o.dsep_terms, "X Y | Z")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    Output result;
    if (canon->parsed()) {
      result = cmd_canon(o);
    } else {
      MDag m = load_model(o.model);
      if (analyze->parsed()) result = cmd_analyze(m, o);
      else if (identify->parsed()) result = cmd_identify(m, o);
      else if (verify->parsed()) result = cmd_verify(m, o);
      else if (dsep->parsed()) result = cmd_dsep(m, o);
      else result = cmd_classify(m, o);
    }
    if (o.out_path.empty()) out << result.text;
    else write_atomic(o.out_path, result.text);
    return result.code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedQuery& e) {
    err << "unsupported query: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mdagid
