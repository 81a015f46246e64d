#pragma once

// Sheaf documents: JSON with rationals written as "p/q" strings.
//
// {
//   "signature": {"relations": {"R": 1}, "functions": {}, "constants": ["c"]},
//   "base":  {"points": ["a", "b"], "opens": [[], ["a"], ["b"], ["a", "b"]]},
//   "etale": {"elements": ["u", "v"], "proj": {"u": "a", "v": "b"}, "opens": [["u"], ["v"]]},
//   "fibers": {"a": {"metric": {"u": {"u": "0"}}, "relations": {"R": {"u": "0"}},
//                    "functions": {"f": {"u,u": "u"}}, "constants": {"c": "u"}}, ...},
//   "moduli": {"R": {"grid": ["1/2"], "delta": ["1/4"]}},
//   "named_sections": {"uw": ["u", "w"]}
// }
//
// "etale.opens" generates the topology of E.  Relation and function tables
// are keyed by comma-joined argument names.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msf/errors.hpp"
#include "msf/rational.hpp"
#include "msf/sheaf.hpp"
#include "msf/topology.hpp"

namespace msf {

namespace detail {

using nlohmann::json;

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DocumentError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline Rational rational_of(const json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  } catch (const Error& e) {
    throw DocumentError(e.what());
  }
  throw DocumentError("expected a rational string, got " + j.dump());
}

template <class Id>
Id lookup(const std::vector<std::string>& names, const std::string& name, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return Id(static_cast<std::uint32_t>(i));
  }
  throw DocumentError(std::string("unknown ") + what + " '" + name + "'");
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(part);
  return out;
}

}  // namespace detail

inline SheafSpec parse_document(const nlohmann::json& doc) {
  using detail::field;
  using detail::json;
  SheafSpec s;
  try {
    const json& sig = field(doc, "signature");
    if (sig.contains("relations")) s.signature.relations = sig.at("relations").get<std::map<std::string, int>>();
    if (sig.contains("functions")) s.signature.functions = sig.at("functions").get<std::map<std::string, int>>();
    if (sig.contains("constants")) s.signature.constants = sig.at("constants").get<std::vector<std::string>>();

    const json& base = field(doc, "base");
    s.point_names = field(base, "points").get<std::vector<std::string>>();
    auto point = [&](const std::string& n) { return detail::lookup<PointId>(s.point_names, n, "point"); };
    for (const auto& o : field(base, "opens")) {
      PointSet set;
      for (const auto& p : o) set.insert(point(p.get<std::string>()));
      s.base_opens.push_back(set);
    }

    const json& etale = field(doc, "etale");
    s.element_names = field(etale, "elements").get<std::vector<std::string>>();
    auto element = [&](const std::string& n) { return detail::lookup<ElementId>(s.element_names, n, "element"); };
    const json& proj = field(etale, "proj");
    for (const auto& e : s.element_names) {
      if (!proj.contains(e)) throw DocumentError("no projection for element '" + e + "'");
      s.proj.push_back(point(proj.at(e).get<std::string>()));
    }
    for (const auto& o : field(etale, "opens")) {
      ElementSet set;
      for (const auto& e : o) set.insert(element(e.get<std::string>()));
      s.etale_opens.push_back(set);
    }

    auto tuple = [&](const std::string& key) {
      Tuple t;
      for (const auto& n : detail::split_commas(key)) t.push_back(element(n));
      return t;
    };
    const json& fibers = field(doc, "fibers");
    for (const auto& pname : s.point_names) {
      if (!fibers.contains(pname)) throw DocumentError("no fiber for point '" + pname + "'");
      const json& fb = fibers.at(pname);
      for (const auto& [a, row] : field(fb, "metric").items()) {
        for (const auto& [b, v] : row.items()) s.metric[{element(a), element(b)}] = detail::rational_of(v);
      }
      if (fb.contains("relations")) {
        for (const auto& [r, table] : fb.at("relations").items()) {
          for (const auto& [args, v] : table.items()) s.relations[r][tuple(args)] = detail::rational_of(v);
        }
      }
      if (fb.contains("functions")) {
        for (const auto& [f, table] : fb.at("functions").items()) {
          for (const auto& [args, v] : table.items()) s.functions[f][tuple(args)] = element(v.get<std::string>());
        }
      }
      if (fb.contains("constants")) {
        for (const auto& [c, v] : fb.at("constants").items()) {
          auto& slots = s.constants[c];
          slots.resize(s.point_names.size(), ElementId(UINT32_MAX));
          slots[point(pname).value] = element(v.get<std::string>());
        }
      }
    }
    for (const auto& [c, slots] : s.constants) {
      for (ElementId e : slots) {
        if (e.value == UINT32_MAX) throw DocumentError("constant '" + c + "' is missing at some point");
      }
    }

    if (doc.contains("moduli")) {
      for (const auto& [sym, mj] : doc.at("moduli").items()) {
        Modulus mod;
        for (const auto& g : field(mj, "grid")) mod.grid.push_back(detail::rational_of(g));
        for (const auto& d : field(mj, "delta")) mod.delta.push_back(detail::rational_of(d));
        s.moduli[sym] = mod;
      }
    }
    if (doc.contains("named_sections")) {
      for (const auto& [name, elems] : doc.at("named_sections").items()) {
        ElementSet set;
        for (const auto& e : elems) set.insert(element(e.get<std::string>()));
        s.named_sections[name] = set;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("malformed document: ") + e.what());
  }
  return s;
}

inline MetricSheaf load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("malformed document: ") + e.what());
  }
  try {
    return MetricSheaf(parse_document(doc));
  } catch (const DocumentError&) {
    throw;
  } catch (const Error& e) {
    throw DocumentError(e.what());
  }
}

// --- names on the command line ---

namespace detail {
inline std::vector<std::string> split_plus(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, '+')) out.push_back(part);
  return out;
}
}  // namespace detail

/// "X", "EMPTY", points joined by '+', or the printed form "{a,b}".
/// Openness is not checked here.
inline PointSet parse_point_set(const MetricSheaf& m, const std::string& text) {
  if (text == "X") return m.base().full();
  if (text == "EMPTY") return {};
  std::string body = text;
  if (body.size() >= 2 && body.front() == '{' && body.back() == '}') {
    body = body.substr(1, body.size() - 2);
    if (body.empty()) return {};
    std::replace(body.begin(), body.end(), ',', '+');
  }
  PointSet out;
  for (const auto& p : detail::split_plus(body)) {
    auto id = m.find_point(p);
    if (!id) throw DocumentError("unknown point '" + p + "'");
    out.insert(*id);
  }
  return out;
}

/// A named section, a constant, or the image of a section written as
/// elements joined by '+'.
inline Section parse_section(const MetricSheaf& m, const std::string& text) {
  if (auto s = m.named_section(text)) return *s;
  if (m.signature().has_constant(text)) return m.constant(text);
  ElementSet image;
  for (const auto& e : detail::split_plus(text)) {
    auto id = m.find_element(e);
    if (!id) throw DocumentError("unknown section '" + text + "'");
    image.insert(*id);
  }
  if (!m.is_section(image)) throw DocumentError("'" + text + "' is not the image of a section");
  return m.section_from_image(image);
}

/// "at:P" where P is the first point of the generating atom.
inline std::string ultrafilter_name(const MetricSheaf& m, const OpenFilter& f) {
  if (!f.atom()) throw Error("only principal ultrafilters are named");
  return "at:" + m.point_name(f.atom()->front());
}

/// Resolves "at:P" to the ultrafilter generated by the atom containing P.
inline OpenFilter resolve_ultrafilter(const MetricSheaf& m, const std::string& name) {
  if (name.rfind("at:", 0) != 0) throw DocumentError("ultrafilter names look like at:POINT");
  auto p = m.find_point(name.substr(3));
  if (!p) throw DocumentError("unknown point in '" + name + "'");
  for (const auto& f : enumerate_regular_ultrafilters(m.base())) {
    if (f.atom()->contains(*p)) return f;
  }
  throw DocumentError("no regular-open atom contains '" + name.substr(3) + "'");
}

}  // namespace msf
