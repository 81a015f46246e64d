#pragma once

// Command implementations behind tools/msf.  Each returns the exit code, a
// human report and a JSON report; main() only parses arguments and prints.

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msf/document.hpp"
#include "msf/errors.hpp"
#include "msf/forcing.hpp"
#include "msf/generic.hpp"
#include "msf/logic.hpp"
#include "msf/sheaf.hpp"
#include "msf/suites.hpp"

namespace msf::cli {

using Json = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kFailure = 1, kInputError = 2 };

struct Outcome {
  int exit_code = kOk;
  std::string text;
  Json json = Json::object();
};

struct ForceArgs {
  std::string file;
  std::optional<std::string> at;
  std::optional<std::string> on;
  std::string cond;
  std::vector<std::string> lets;
};

struct GmtArgs {
  std::string file;
  std::optional<std::string> ultrafilter;
  bool all = false;
  int depth = 3;
  int quant = 1;
  std::string eps = "1/4,1/2,3/4";
};

namespace detail {

inline Outcome error_outcome(int code, const std::string& kind, const std::string& message) {
  Outcome o;
  o.exit_code = code;
  o.text = "error: " + message + "\n";
  o.json["error"] = kind;
  o.json["message"] = message;
  return o;
}

/// Runs body and maps library errors to exit codes.
inline Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const HypothesisViolated& e) {
    Outcome o = error_outcome(kFailure, "HypothesisViolated", e.what());
    o.json["hypothesis"] = e.hypothesis();
    return o;
  } catch (const ValidationFailure& e) {
    Outcome o = error_outcome(kFailure, "ValidationFailure", e.what());
    o.json["clause"] = e.clause();
    return o;
  } catch (const EmptyOpen& e) {
    return error_outcome(kFailure, "EmptyOpen", e.what());
  } catch (const DocumentError& e) {
    return error_outcome(kInputError, "DocumentError", e.what());
  } catch (const SyntaxError& e) {
    return error_outcome(kInputError, "SyntaxError", e.what());
  } catch (const ArityError& e) {
    return error_outcome(kInputError, "ArityError", e.what());
  } catch (const EpsOutOfRange& e) {
    return error_outcome(kInputError, "EpsOutOfRange", e.what());
  } catch (const UnboundVariable& e) {
    return error_outcome(kInputError, "UnboundVariable", e.what());
  } catch (const NotOpen& e) {
    return error_outcome(kInputError, "NotOpen", e.what());
  } catch (const Error& e) {
    return error_outcome(kInputError, "Error", e.what());
  } catch (const std::exception& e) {
    return error_outcome(kInputError, "Error", e.what());
  }
}

/// Loads a document and insists it validates.
inline MetricSheaf load_valid(const std::string& file) {
  MetricSheaf m = load_document(file);
  validate_sheaf(m).throw_if_failed();
  return m;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

inline std::vector<Rational> parse_eps_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& p : split(text, ',')) {
    Rational e;
    try {
      e = parse_rational(p);
    } catch (const Error& err) {
      throw DocumentError(err.what());
    }
    if (e <= Rational(0) || e >= Rational(1)) throw EpsOutOfRange("threshold " + to_string(e) + " is outside (0,1)");
    out.push_back(e);
  }
  if (out.empty()) throw DocumentError("empty threshold list");
  return out;
}

inline Json witness_json(const MetricSheaf& m, const ForcingWitness& w) {
  Json j;
  j["clause"] = w.clause;
  if (w.open) j["open"] = m.describe(*w.open);
  if (!w.covering.empty()) {
    Json cov = Json::array();
    for (const auto& [u, s] : w.covering) {
      Json piece;
      piece["open"] = m.describe(u);
      if (s) piece["section"] = m.describe(*s);
      cov.push_back(piece);
    }
    j["covering"] = cov;
  }
  if (w.section) j["section"] = m.describe(*w.section);
  if (w.r) j["r"] = to_string(*w.r);
  if (w.delta) j["delta"] = to_string(*w.delta);
  if (w.eps_prime) j["eps_prime"] = to_string(*w.eps_prime);
  return j;
}

inline std::string witness_text(const MetricSheaf& m, const ForcingWitness& w) {
  std::string out = "  witness: " + w.clause + "\n";
  if (w.open) out += "    open " + m.describe(*w.open) + "\n";
  for (const auto& [u, s] : w.covering) {
    out += "    on " + m.describe(u);
    if (s) out += " section " + m.describe(*s);
    out += "\n";
  }
  if (w.section) out += "    section " + m.describe(*w.section) + "\n";
  if (w.r) out += "    r = " + to_string(*w.r) + "\n";
  if (w.delta) out += "    delta = " + to_string(*w.delta) + "\n";
  if (w.eps_prime) out += "    eps' = " + to_string(*w.eps_prime) + "\n";
  return out;
}

inline std::vector<OpenFilter> chosen_ultrafilters(const MetricSheaf& m, const std::optional<std::string>& name,
                                                   bool all) {
  if (all == name.has_value()) throw DocumentError("give exactly one of --ultrafilter and --all");
  if (!is_regular_space(m.base())) throw HypothesisViolated("regularity");
  if (all) return enumerate_regular_ultrafilters(m.base());
  return {resolve_ultrafilter(m, *name)};
}

}  // namespace detail

inline Outcome run_validate(const std::string& file) {
  return detail::guarded([&] {
    const MetricSheaf m = load_document(file);
    const ValidationReport rep = validate_sheaf(m);
    Outcome o;
    o.text = "validate " + file + "\n";
    o.json["command"] = "validate";
    o.json["file"] = file;
    Json clauses = Json::array();
    for (const auto& c : rep.clauses) {
      o.text += std::string(c.passed ? "  pass  " : "  FAIL  ") + c.clause;
      if (!c.passed) o.text += ": " + c.witness;
      o.text += "\n";
      Json j;
      j["clause"] = c.clause;
      j["passed"] = c.passed;
      if (!c.passed) j["witness"] = c.witness;
      clauses.push_back(j);
    }
    o.json["clauses"] = clauses;
    o.json["ok"] = rep.ok();
    if (const auto* f = rep.first_failure()) {
      o.exit_code = kFailure;
      o.json["first_failure"] = f->clause;
      o.text += "result: invalid (" + f->clause + ")\n";
    } else {
      o.text += "result: valid\n";
    }
    return o;
  });
}

inline Outcome run_force(const ForceArgs& a) {
  return detail::guarded([&] {
    if (a.at.has_value() == a.on.has_value()) throw DocumentError("give exactly one of --at and --on");
    const MetricSheaf m = detail::load_valid(a.file);
    const Condition c = parse_condition(a.cond, m.signature());
    Environment env;
    for (const auto& binding : a.lets) {
      const auto eq = binding.find('=');
      if (eq == std::string::npos || eq == 0) throw DocumentError("--let expects VAR=SECTION, got '" + binding + "'");
      env[binding.substr(0, eq)] = parse_section(m, binding.substr(eq + 1));
    }

    Outcome o;
    o.json["command"] = "force";
    o.json["file"] = a.file;
    o.json["condition"] = print_condition(c);
    Json lets = Json::object();
    for (const auto& [v, s] : env) lets[v] = m.describe(s);
    o.json["let"] = lets;
    std::optional<ForcingWitness> witness;
    bool holds = false;
    std::string where;
    if (a.at) {
      const auto x = m.find_point(*a.at);
      if (!x) throw DocumentError("unknown point '" + *a.at + "'");
      where = "at " + *a.at;
      o.json["at"] = *a.at;
      if (c.cmp == Cmp::LessEq || c.cmp == Cmp::GreaterEq) {
        holds = forces_at(m, *x, c, env);
      } else {
        const ForcingVerdict v = force_point(m, *x, c, env);
        holds = v.holds;
        witness = v.witness;
      }
    } else {
      const PointSet u = parse_point_set(m, *a.on);
      if (u.empty()) throw EmptyOpen();
      if (!m.base().is_open(u)) throw NotOpen(m.describe(u) + " is not open");
      if (c.cmp == Cmp::LessEq || c.cmp == Cmp::GreaterEq) {
        throw DocumentError("non-strict conditions are only forced at points");
      }
      where = "on " + m.describe(u);
      o.json["on"] = m.describe(u);
      const ForcingVerdict v = force_local(m, u, c, env);
      holds = v.holds;
      witness = v.witness;
    }
    o.json["holds"] = holds;
    if (witness) o.json["witness"] = detail::witness_json(m, *witness);
    o.text = "force " + print_condition(c) + " " + where + "\n";
    for (const auto& [v, s] : env) o.text += "  let " + v + " = " + m.describe(s) + "\n";
    o.text += std::string("  verdict: ") + (holds ? "holds" : "fails") + "\n";
    if (witness) o.text += detail::witness_text(m, *witness);
    return o;
  });
}

inline Outcome run_generic(const std::string& file, const std::string& ultrafilter) {
  return detail::guarded([&] {
    const MetricSheaf m = detail::load_valid(file);
    if (!is_regular_space(m.base())) throw HypothesisViolated("regularity");
    const OpenFilter F = resolve_ultrafilter(m, ultrafilter);
    const GenericModel G(m, F);
    if (auto bad = G.check_well_defined()) throw Error("generic model is not well defined: " + *bad);

    Outcome o;
    const std::string fname = ultrafilter_name(m, F);
    o.json["command"] = "generic";
    o.json["file"] = file;
    o.json["ultrafilter"] = fname;
    o.text = "generic model at " + fname + "\n";
    Json members = Json::array();
    for (PointSet u : F.members()) members.push_back(m.describe(u));
    o.json["filter"] = members;

    auto cls = [](std::size_t i) { return "[" + std::to_string(i) + "]"; };
    Json classes = Json::array();
    o.text += "  classes: " + std::to_string(G.size()) + "\n";
    for (std::size_t i = 0; i < G.size(); ++i) {
      const auto& c = G.universe()[i];
      Json j;
      j["representative"] = m.describe(c.representative);
      j["members"] = c.members.size();
      classes.push_back(j);
      o.text += "    " + cls(i) + " " + m.describe(c.representative) + " (" + std::to_string(c.members.size()) +
                " sections)\n";
    }
    o.json["classes"] = classes;

    Json dist = Json::array();
    o.text += "  d:\n";
    for (std::size_t i = 0; i < G.size(); ++i) {
      Json row = Json::array();
      o.text += "   ";
      for (std::size_t j = 0; j < G.size(); ++j) {
        row.push_back(to_string(G.dist(i, j)));
        o.text += " " + to_string(G.dist(i, j));
      }
      dist.push_back(row);
      o.text += "\n";
    }
    o.json["d"] = dist;

    auto tuple_name = [&](const std::vector<std::size_t>& t) {
      std::string s;
      for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + cls(t[k]);
      return s;
    };
    Json rels = Json::object();
    for (const auto& [name, arity] : m.signature().relations) {
      Json table = Json::object();
      o.text += "  " + name + ":";
      G.for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        table[tuple_name(t)] = to_string(G.relation(name, t));
        o.text += " " + name + "(" + tuple_name(t) + ")=" + to_string(G.relation(name, t));
      });
      o.text += "\n";
      rels[name] = table;
    }
    o.json["relations"] = rels;
    Json funs = Json::object();
    for (const auto& [name, arity] : m.signature().functions) {
      Json table = Json::object();
      o.text += "  " + name + ":";
      G.for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        table[tuple_name(t)] = cls(G.function(name, t));
        o.text += " " + name + "(" + tuple_name(t) + ")=" + cls(G.function(name, t));
      });
      o.text += "\n";
      funs[name] = table;
    }
    o.json["functions"] = funs;
    Json consts = Json::object();
    for (const auto& c : m.signature().constants) {
      consts[c] = cls(G.constant(c));
      o.text += "  " + c + " = " + cls(G.constant(c)) + "\n";
    }
    o.json["constants"] = consts;
    return o;
  });
}

inline Outcome run_gmt(const GmtArgs& a) {
  return detail::guarded([&] {
    if (a.depth < 0 || a.quant < 0) throw DocumentError("--depth and --quant must be nonnegative");
    const auto eps = detail::parse_eps_list(a.eps);
    const MetricSheaf m = detail::load_valid(a.file);
    const auto filters = detail::chosen_ultrafilters(m, a.ultrafilter, a.all);

    Outcome o;
    o.json["command"] = "gmt";
    o.json["file"] = a.file;
    o.json["depth"] = a.depth;
    o.json["quant"] = a.quant;
    Json eps_json = Json::array();
    for (const auto& e : eps) eps_json.push_back(to_string(e));
    o.json["eps"] = eps_json;
    o.text = "gmt " + a.file + " depth " + std::to_string(a.depth) + " quant " + std::to_string(a.quant) + "\n";
    Json per = Json::array();
    std::size_t total = 0;
    std::size_t agree = 0;
    for (const OpenFilter& F : filters) {
      const GenericModel G(m, F);
      for (const auto& [name, t] : gmt_sweep(m, G, a.depth, a.quant, eps)) {
        total += t.conditions;
        agree += t.agree;
        Json j;
        j["ultrafilter"] = name;
        j["conditions"] = t.conditions;
        j["agree"] = t.agree;
        j["counterexamples"] = t.counterexamples;
        per.push_back(j);
        o.text += "  " + name + ": " + std::to_string(t.agree) + "/" + std::to_string(t.conditions) + " agree\n";
        for (const auto& c : t.counterexamples) o.text += "    disagreement: " + c + "\n";
      }
    }
    o.json["ultrafilters"] = per;
    o.json["conditions"] = total;
    o.json["agree"] = agree;
    o.text += "result: " + std::to_string(agree) + "/" + std::to_string(total) + " agree\n";
    if (agree != total) o.exit_code = kFailure;
    return o;
  });
}

inline Outcome run_props(const std::string& file) {
  return detail::guarded([&] {
    const MetricSheaf m = detail::load_valid(file);
    std::vector<SuiteResult> results = run_all_suites(m);
    results.push_back(suite_flow_extensions(m));

    Outcome o;
    o.json["command"] = "props";
    o.json["file"] = file;
    o.text = "props " + file + "\n";
    Json suites = Json::array();
    bool ok = true;
    for (const auto& r : results) {
      Json j;
      j["suite"] = r.name;
      if (r.skipped) {
        j["skipped"] = *r.skipped;
        o.text += "  skip  " + r.name + " (" + *r.skipped + ")\n";
      } else {
        j["checks"] = r.checks;
        j["failures"] = r.failures;
        j["examples"] = r.examples;
        o.text += std::string(r.ok() ? "  pass  " : "  FAIL  ") + r.name + " (" + std::to_string(r.checks) +
                  " checks, " + std::to_string(r.failures) + " failures)\n";
        for (const auto& e : r.examples) o.text += "    " + e + "\n";
      }
      ok = ok && r.ok();
      suites.push_back(j);
    }
    o.json["suites"] = suites;
    o.json["ok"] = ok;
    o.text += std::string("result: ") + (ok ? "all properties hold" : "violations found") + "\n";
    if (!ok) o.exit_code = kFailure;
    return o;
  });
}

/// Runs a command, optionally recording wall time in the report.
inline Outcome timed(const std::function<Outcome()>& run, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = run();
  if (timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream s;
    s.precision(3);
    s << std::fixed << secs;
    o.json["seconds"] = secs;
    o.text += "time: " + s.str() + " s\n";
  }
  return o;
}

inline std::string render(const Outcome& o, bool json) { return json ? o.json.dump(2) + "\n" : o.text; }

}  // namespace msf::cli
