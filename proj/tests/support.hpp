#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msf/document.hpp"

namespace msf::test {

inline std::string fixture(const std::string& name) { return std::string(MSF_FIXTURE_DIR) + "/" + name + ".msf"; }

inline nlohmann::json fixture_json(const std::string& name) {
  std::ifstream in(fixture(name));
  return nlohmann::json::parse(in);
}

inline MetricSheaf load_fixture(const std::string& name) { return load_document(fixture(name)); }

inline MetricSheaf from_json(const nlohmann::json& doc) { return MetricSheaf(parse_document(doc)); }

inline const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> names{"disc", "indisc", "cyc", "sierpinski"};
  return names;
}

inline const std::vector<std::string>& regular_fixtures() {
  static const std::vector<std::string> names{"disc", "indisc", "cyc"};
  return names;
}

struct Mutation {
  std::string name;
  std::string clause;
  nlohmann::json doc;
};

/// Six documents that each break one sheaf axiom, with the clause expected to
/// report it first.
inline std::vector<Mutation> seeded_mutations() {
  std::vector<Mutation> out;

  auto symmetry = fixture_json("disc");
  symmetry["fibers"]["a"]["metric"]["v"]["u"] = "1/4";
  out.push_back({"broken symmetry", "fiber metric axioms", symmetry});

  auto triangle = fixture_json("cyc");
  triangle["fibers"]["q0"]["metric"]["q0_0"]["q0_2"] = "1";
  triangle["fibers"]["q0"]["metric"]["q0_2"]["q0_0"] = "1";
  out.push_back({"broken triangle", "fiber metric axioms", triangle});

  auto diameter = fixture_json("disc");
  diameter["fibers"]["a"]["metric"]["u"]["v"] = "3/2";
  diameter["fibers"]["a"]["metric"]["v"]["u"] = "3/2";
  out.push_back({"diameter above 1", "fiber diameter", diameter});

  auto jump = fixture_json("indisc");
  jump["fibers"]["b"]["metric"]["w"]["z"] = "1/4";
  jump["fibers"]["b"]["metric"]["z"]["w"] = "1/4";
  out.push_back({"discontinuous d", "continuity of d", jump});

  auto constant = fixture_json("indisc");
  constant["fibers"]["b"]["constants"]["c"] = "z";
  out.push_back({"non-section constant", "constants are continuous global sections", constant});

  auto modulus = fixture_json("disc");
  modulus["moduli"]["R"]["delta"][0] = "0";
  out.push_back({"zero modulus", "modulus positivity", modulus});

  return out;
}

/// Sierpinski-like spaces and friends, given by their open sets.
inline FiniteTopology topology(std::size_t n, const std::vector<std::vector<std::uint32_t>>& opens) {
  std::vector<PointSet> sets;
  for (const auto& o : opens) {
    PointSet s;
    for (auto p : o) s.insert(PointId(p));
    sets.push_back(s);
  }
  return FiniteTopology::from_opens(n, sets);
}

inline PointSet points(std::initializer_list<std::uint32_t> ids) {
  PointSet s;
  for (auto i : ids) s.insert(PointId(i));
  return s;
}

}  // namespace msf::test
