#pragma once

// Sheaves of metric structures presented as étale spaces over a finite base.
//
// A section is stored as its image in E; the domain is the projection of the
// image and the value at x is the unique image element in the fiber over x.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msf/errors.hpp"
#include "msf/index_set.hpp"
#include "msf/rational.hpp"
#include "msf/topology.hpp"

namespace msf {

struct Signature {
  std::map<std::string, int> relations;
  std::map<std::string, int> functions;
  std::vector<std::string> constants;

  bool has_relation(const std::string& s) const { return relations.count(s) != 0; }
  bool has_function(const std::string& s) const { return functions.count(s) != 0; }
  bool has_constant(const std::string& s) const {
    return std::find(constants.begin(), constants.end(), s) != constants.end();
  }
};

/// Step-function modulus of uniform continuity: for each grid value ε,
/// inputs closer than delta[i] keep outputs within grid[i].
struct Modulus {
  std::vector<Rational> grid;
  std::vector<Rational> delta;

  static Modulus halving(std::vector<Rational> grid = {Rational(1, 2), Rational(1, 4), Rational(1, 8)}) {
    Modulus m;
    for (const auto& e : grid) m.delta.push_back(e / 2);
    m.grid = std::move(grid);
    return m;
  }
};

using Tuple = std::vector<ElementId>;

/// Plain description of a sheaf, as read from a document or built in a test.
/// Relation and function tables are keyed by element tuples lying in a single
/// fiber; constants give one element per point.
struct SheafSpec {
  Signature signature;
  std::vector<std::string> point_names;
  std::vector<PointSet> base_opens;
  std::vector<std::string> element_names;
  std::vector<PointId> proj;
  /// Generating family for the topology of E.
  std::vector<ElementSet> etale_opens;
  std::map<std::pair<ElementId, ElementId>, Rational> metric;
  std::map<std::string, std::map<Tuple, Rational>> relations;
  std::map<std::string, std::map<Tuple, ElementId>> functions;
  std::map<std::string, std::vector<ElementId>> constants;
  std::map<std::string, Modulus> moduli;
  std::map<std::string, ElementSet> named_sections;
};

struct Section {
  PointSet domain;
  ElementSet image;

  friend bool operator==(const Section&, const Section&) = default;
  /// Domain by (cardinality, bits), then image bits.
  friend std::strong_ordering operator<=>(const Section& a, const Section& b) {
    if (auto c = a.domain <=> b.domain; c != 0) return c;
    return a.image.bits() <=> b.image.bits();
  }
};

struct ClauseResult {
  std::string clause;
  bool passed = true;
  std::string witness;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;

  bool ok() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
  }
  const ClauseResult* first_failure() const {
    for (const auto& c : clauses) {
      if (!c.passed) return &c;
    }
    return nullptr;
  }
  const ClauseResult& at(const std::string& clause) const {
    for (const auto& c : clauses) {
      if (c.clause == clause) return c;
    }
    throw Error("no clause named '" + clause + "'");
  }
  void throw_if_failed() const {
    if (const auto* f = first_failure()) throw ValidationFailure(f->clause, f->witness);
  }
};

class MetricSheaf {
 public:
  explicit MetricSheaf(SheafSpec spec) : spec_(std::move(spec)) {
    const std::size_t np = spec_.point_names.size();
    const std::size_t ne = spec_.element_names.size();
    if (np == 0) throw DocumentError("base space has no points");
    if (np > 64 || ne > 64) throw DocumentError("at most 64 points and 64 elements are supported");
    base_ = FiniteTopology::from_opens(np, spec_.base_opens);
    if (spec_.proj.size() != ne) throw DocumentError("projection must list every element");
    fiber_mask_.assign(np, ElementSet{});
    for (std::size_t e = 0; e < ne; ++e) {
      const PointId x = spec_.proj[e];
      if (x.value >= np) throw DocumentError("projection of '" + spec_.element_names[e] + "' is not a point");
      fiber_mask_[x.value].insert(ElementId(static_cast<std::uint32_t>(e)));
    }
    for (std::size_t x = 0; x < np; ++x) {
      if (fiber_mask_[x].empty()) throw DocumentError("fiber over '" + spec_.point_names[x] + "' is empty");
    }
    etale_ = ElementTopology::generated_by(ne, spec_.etale_opens);

    metric_.assign(ne * ne, Rational(0));
    for (std::size_t x = 0; x < np; ++x) {
      for (ElementId a : fiber_mask_[x]) {
        for (ElementId b : fiber_mask_[x]) {
          auto it = spec_.metric.find({a, b});
          if (it == spec_.metric.end()) {
            throw DocumentError("metric entry missing for (" + element_name(a) + ", " + element_name(b) + ")");
          }
          metric_[a.value * ne + b.value] = it->second;
        }
      }
    }

    for (const auto& [name, arity] : spec_.signature.relations) {
      if (arity < 1) throw DocumentError("relation '" + name + "' needs positive arity");
      auto table = spec_.relations.find(name);
      if (table == spec_.relations.end()) throw DocumentError("no interpretation for relation '" + name + "'");
      RelationTable rt{arity, std::vector<Rational>(power(ne, arity))};
      for_each_fiber_tuple(arity, [&](const Tuple& t) {
        auto it = table->second.find(t);
        if (it == table->second.end()) {
          throw DocumentError("relation '" + name + "' undefined at " + describe_tuple(t));
        }
        rt.values[flat(t)] = it->second;
      });
      relation_ids_[name] = relations_.size();
      relations_.push_back(std::move(rt));
    }
    for (const auto& [name, arity] : spec_.signature.functions) {
      if (arity < 1) throw DocumentError("function '" + name + "' needs positive arity");
      auto table = spec_.functions.find(name);
      if (table == spec_.functions.end()) throw DocumentError("no interpretation for function '" + name + "'");
      FunctionTable ft{arity, std::vector<ElementId>(power(ne, arity))};
      for_each_fiber_tuple(arity, [&](const Tuple& t) {
        auto it = table->second.find(t);
        if (it == table->second.end()) {
          throw DocumentError("function '" + name + "' undefined at " + describe_tuple(t));
        }
        if (it->second.value >= ne || spec_.proj[it->second.value] != spec_.proj[t[0].value]) {
          throw DocumentError("function '" + name + "' leaves the fiber at " + describe_tuple(t));
        }
        ft.values[flat(t)] = it->second;
      });
      function_ids_[name] = functions_.size();
      functions_.push_back(std::move(ft));
    }
    for (const auto& name : spec_.signature.constants) {
      auto it = spec_.constants.find(name);
      if (it == spec_.constants.end() || it->second.size() != np) {
        throw DocumentError("constant '" + name + "' must name one element per point");
      }
      ElementSet image;
      for (std::size_t x = 0; x < np; ++x) {
        const ElementId e = it->second[x];
        if (e.value >= ne || spec_.proj[e.value].value != x) {
          throw DocumentError("constant '" + name + "' picks an element outside the fiber over '" +
                              spec_.point_names[x] + "'");
        }
        image.insert(e);
      }
      constants_[name] = Section{base_.full(), image};
    }
    for (const auto& [name, image] : spec_.named_sections) {
      if (!image.subset_of(ElementSet::full(ne))) throw DocumentError("section '" + name + "' names unknown elements");
    }

    for (PointSet u : base_.opens()) sections_[u.bits()] = enumerate_choices(u);
  }

  const SheafSpec& spec() const { return spec_; }
  const Signature& signature() const { return spec_.signature; }
  const FiniteTopology& base() const { return base_; }
  const ElementTopology& etale() const { return etale_; }
  std::size_t num_points() const { return spec_.point_names.size(); }
  std::size_t num_elements() const { return spec_.element_names.size(); }

  const std::string& point_name(PointId x) const { return spec_.point_names.at(x.value); }
  const std::string& element_name(ElementId e) const { return spec_.element_names.at(e.value); }
  std::optional<PointId> find_point(const std::string& name) const { return find_name(spec_.point_names, name, PointId{}); }
  std::optional<ElementId> find_element(const std::string& name) const {
    return find_name(spec_.element_names, name, ElementId{});
  }

  PointId proj(ElementId e) const { return spec_.proj.at(e.value); }
  ElementSet fiber(PointId x) const { return fiber_mask_.at(x.value); }
  ElementSet over(PointSet u) const {
    ElementSet s;
    for (PointId x : u) s |= fiber_mask_[x.value];
    return s;
  }
  PointSet projection(ElementSet s) const {
    PointSet out;
    for (ElementId e : s) out.insert(proj(e));
    return out;
  }

  const Rational& dist(ElementId a, ElementId b) const { return metric_[a.value * num_elements() + b.value]; }

  std::size_t relation_id(const std::string& name) const {
    auto it = relation_ids_.find(name);
    if (it == relation_ids_.end()) throw ArityMismatch("unknown relation '" + name + "'");
    return it->second;
  }
  std::size_t function_id(const std::string& name) const {
    auto it = function_ids_.find(name);
    if (it == function_ids_.end()) throw ArityMismatch("unknown function '" + name + "'");
    return it->second;
  }
  int relation_arity(std::size_t id) const { return relations_.at(id).arity; }
  int function_arity(std::size_t id) const { return functions_.at(id).arity; }

  const Rational& relation(std::size_t id, const Tuple& args) const { return relations_[id].values[flat(args)]; }
  ElementId function(std::size_t id, const Tuple& args) const { return functions_[id].values[flat(args)]; }

  const Section& constant(const std::string& name) const {
    auto it = constants_.find(name);
    if (it == constants_.end()) throw DocumentError("unknown constant '" + name + "'");
    return it->second;
  }

  // --- sections ---

  bool is_section(ElementSet image) const {
    for (PointId x : projection(image)) {
      if ((image & fiber(x)).size() != 1) return false;
    }
    return etale_.is_open(image) && base_.is_open(projection(image));
  }

  Section section_from_image(ElementSet image) const {
    if (!is_section(image)) throw NotOpen("not the image of a section");
    return Section{projection(image), image};
  }

  ElementId value(const Section& s, PointId x) const {
    const ElementSet hit = s.image & fiber(x);
    if (hit.empty()) throw Error("section undefined at '" + point_name(x) + "'");
    return hit.front();
  }

  /// Every section over the open set `u`, in (image bits) order.
  const std::vector<Section>& sections(PointSet u) const {
    auto it = sections_.find(u.bits());
    if (it == sections_.end()) throw NotOpen("sections requested over a set that is not open");
    return it->second;
  }

  Section restrict(const Section& s, PointSet v) const {
    if (!base_.is_open(v)) throw NotOpen("restriction to a set that is not open");
    if (!v.subset_of(s.domain)) throw Error("restriction outside the section's domain");
    return Section{v, s.image & over(v)};
  }

  Section apply_function(const std::string& f, const std::vector<Section>& args) const {
    const std::size_t id = function_id(f);
    if (static_cast<int>(args.size()) != function_arity(id)) {
      throw ArityMismatch("function '" + f + "' expects " + std::to_string(function_arity(id)) + " arguments");
    }
    const PointSet dom = args.empty() ? base_.full() : args.front().domain;
    for (const auto& a : args) {
      if (a.domain != dom) throw Error("function arguments must share one domain");
    }
    ElementSet image;
    Tuple t(args.size());
    for (PointId x : dom) {
      for (std::size_t i = 0; i < args.size(); ++i) t[i] = value(args[i], x);
      image.insert(function(id, t));
    }
    if (!etale_.is_open(image)) throw NotOpen("image of '" + f + "' is not open");
    return Section{dom, image};
  }

  std::optional<Section> named_section(const std::string& name) const {
    auto it = spec_.named_sections.find(name);
    if (it == spec_.named_sections.end()) return std::nullopt;
    return section_from_image(it->second);
  }

  /// "u+w" style description; "()" for the empty section.
  std::string describe(const Section& s) const {
    if (s.image.empty()) return "()";
    std::string out;
    for (ElementId e : s.image) {
      if (!out.empty()) out += '+';
      out += element_name(e);
    }
    return out;
  }

  std::string describe(PointSet u) const {
    if (u.empty()) return "{}";
    std::string out = "{";
    for (PointId x : u) {
      if (out.size() > 1) out += ',';
      out += point_name(x);
    }
    return out + "}";
  }

  std::string describe_tuple(const Tuple& t) const {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + element_name(t[i]);
    return out + ")";
  }

  /// Calls `fn` on every tuple of the given arity drawn from a single fiber.
  template <class Fn>
  void for_each_fiber_tuple(int arity, Fn&& fn) const {
    for (std::size_t x = 0; x < num_points(); ++x) {
      const auto members = fiber_mask_[x].members();
      Tuple t(static_cast<std::size_t>(arity));
      std::vector<std::size_t> idx(t.size(), 0);
      while (true) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = members[idx[i]];
        fn(static_cast<const Tuple&>(t));
        std::size_t k = t.size();
        while (k > 0 && ++idx[k - 1] == members.size()) idx[--k] = 0;
        if (k == 0) break;
      }
    }
  }

 private:
  struct RelationTable {
    int arity;
    std::vector<Rational> values;
  };
  struct FunctionTable {
    int arity;
    std::vector<ElementId> values;
  };

  static std::size_t power(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
  }

  std::size_t flat(const Tuple& t) const {
    std::size_t i = 0;
    for (ElementId e : t) i = i * num_elements() + e.value;
    return i;
  }

  template <class Id>
  static std::optional<Id> find_name(const std::vector<std::string>& names, const std::string& name, Id) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return Id(static_cast<std::uint32_t>(it - names.begin()));
  }

  std::vector<Section> enumerate_choices(PointSet u) const {
    std::vector<Section> out;
    const auto points = u.members();
    std::vector<std::vector<ElementId>> choices;
    for (PointId x : points) choices.push_back(fiber(x).members());
    std::vector<std::size_t> idx(points.size(), 0);
    while (true) {
      ElementSet image;
      for (std::size_t i = 0; i < points.size(); ++i) image.insert(choices[i][idx[i]]);
      if (etale_.is_open(image)) out.push_back(Section{u, image});
      std::size_t k = points.size();
      while (k > 0 && ++idx[k - 1] == choices[k - 1].size()) idx[--k] = 0;
      if (k == 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  SheafSpec spec_;
  FiniteTopology base_;
  ElementTopology etale_;
  std::vector<ElementSet> fiber_mask_;
  std::vector<Rational> metric_;
  std::vector<RelationTable> relations_;
  std::vector<FunctionTable> functions_;
  std::map<std::string, std::size_t> relation_ids_;
  std::map<std::string, std::size_t> function_ids_;
  std::map<std::string, Section> constants_;
  std::unordered_map<std::uint64_t, std::vector<Section>> sections_;
};

inline const std::vector<Section>& enumerate_sections(const MetricSheaf& m, PointSet u) { return m.sections(u); }
inline Section restrict_section(const MetricSheaf& m, const Section& s, PointSet v) { return m.restrict(s, v); }
inline Section apply_function_section(const MetricSheaf& m, const std::string& f, const std::vector<Section>& args) {
  return m.apply_function(f, args);
}

namespace detail {

// Iterates over every tuple of `arity` sections drawn from `pool`.
template <class Fn>
bool all_section_tuples(const std::vector<Section>& pool, int arity, Fn&& fn) {
  if (pool.empty()) return true;
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  std::vector<const Section*> t(idx.size());
  while (true) {
    for (std::size_t i = 0; i < idx.size(); ++i) t[i] = &pool[idx[i]];
    if (!fn(t)) return false;
    std::size_t k = idx.size();
    while (k > 0 && ++idx[k - 1] == pool.size()) idx[--k] = 0;
    if (k == 0) return true;
  }
}

}  // namespace detail

/// Runs every clause and records a witness for each failure.
inline ValidationReport validate_sheaf(const MetricSheaf& m) {
  ValidationReport report;
  auto clause = [&](std::string name) -> ClauseResult& {
    report.clauses.push_back(ClauseResult{std::move(name), true, {}});
    return report.clauses.back();
  };
  auto fail = [](ClauseResult& c, std::string witness) {
    if (c.passed) {
      c.passed = false;
      c.witness = std::move(witness);
    }
  };
  const auto& X = m.base();
  const auto& E = m.etale();
  const std::size_t ne = m.num_elements();

  {
    auto& c = clause("local homeomorphism");
    for (PointSet o : X.opens()) {
      if (!E.is_open(m.over(o))) fail(c, "preimage of " + m.describe(o) + " is not open");
    }
    for (std::uint32_t i = 0; i < ne && c.passed; ++i) {
      const ElementId e(i);
      const ElementSet nb = E.minimal_nbhd(e);
      if (m.projection(nb).size() != nb.size()) {
        fail(c, "projection not injective near " + m.element_name(e));
        break;
      }
      for (ElementId f : nb) {
        if (m.projection(E.minimal_nbhd(f)) != X.minimal_nbhd(m.proj(f))) {
          fail(c, "projection of the neighbourhood of " + m.element_name(f) + " is not a base neighbourhood");
          break;
        }
      }
    }
  }

  std::vector<std::vector<ElementId>> fibers;
  for (std::uint32_t x = 0; x < m.num_points(); ++x) fibers.push_back(m.fiber(PointId(x)).members());

  {
    auto& c = clause("fiber metric axioms");
    for (const auto& f : fibers) {
      for (ElementId a : f) {
        if (m.dist(a, a) != Rational(0)) fail(c, "d(" + m.element_name(a) + "," + m.element_name(a) + ") != 0");
        for (ElementId b : f) {
          const std::string ab = m.element_name(a) + "," + m.element_name(b);
          if (m.dist(a, b) < Rational(0)) fail(c, "d(" + ab + ") < 0");
          if (m.dist(a, b) != m.dist(b, a)) fail(c, "d(" + ab + ") is not symmetric");
          for (ElementId k : f) {
            if (m.dist(a, k) > m.dist(a, b) + m.dist(b, k)) {
              fail(c, "triangle fails for " + ab + "," + m.element_name(k));
            }
          }
        }
      }
    }
  }
  {
    auto& c = clause("fiber metric separation");
    for (const auto& f : fibers) {
      for (ElementId a : f) {
        for (ElementId b : f) {
          if (a != b && m.dist(a, b) == Rational(0)) fail(c, "d(" + m.element_name(a) + "," + m.element_name(b) + ") = 0");
        }
      }
    }
  }
  {
    auto& c = clause("fiber diameter");
    for (const auto& f : fibers) {
      for (ElementId a : f) {
        for (ElementId b : f) {
          if (m.dist(a, b) > Rational(1)) fail(c, "d(" + m.element_name(a) + "," + m.element_name(b) + ") > 1");
        }
      }
    }
  }
  // Finite metric spaces are complete.
  clause("fiber completeness");

  // Real-valued data is continuous iff it is constant on every minimal
  // neighbourhood along every tuple of sections over that neighbourhood.
  auto locally_constant = [&](PointSet nb, auto&& valuation) -> std::optional<PointId> {
    std::optional<Rational> first;
    for (PointId y : nb) {
      const Rational v = valuation(y);
      if (!first) first = v;
      else if (v != *first) return y;
    }
    return std::nullopt;
  };

  {
    auto& c = clause("continuity of d");
    for (std::uint32_t xi = 0; xi < m.num_points() && c.passed; ++xi) {
      const PointSet nb = X.minimal_nbhd(PointId(xi));
      detail::all_section_tuples(m.sections(nb), 2, [&](const std::vector<const Section*>& t) {
        auto bad = locally_constant(nb, [&](PointId y) { return m.dist(m.value(*t[0], y), m.value(*t[1], y)); });
        if (bad) fail(c, "d along " + m.describe(*t[0]) + ", " + m.describe(*t[1]) + " varies at " + m.point_name(*bad));
        return !bad;
      });
    }
  }
  {
    auto& c = clause("continuity of relations");
    for (const auto& [name, arity] : m.signature().relations) {
      const std::size_t id = m.relation_id(name);
      for (std::uint32_t xi = 0; xi < m.num_points() && c.passed; ++xi) {
        const PointSet nb = X.minimal_nbhd(PointId(xi));
        detail::all_section_tuples(m.sections(nb), arity, [&](const std::vector<const Section*>& t) {
          auto bad = locally_constant(nb, [&](PointId y) {
            Tuple args;
            for (const Section* s : t) args.push_back(m.value(*s, y));
            return m.relation(id, args);
          });
          if (bad) fail(c, name + " varies at " + m.point_name(*bad));
          return !bad;
        });
      }
    }
  }
  {
    auto& c = clause("continuity of functions");
    for (const auto& [name, arity] : m.signature().functions) {
      for (std::uint32_t xi = 0; xi < m.num_points() && c.passed; ++xi) {
        const PointSet nb = X.minimal_nbhd(PointId(xi));
        detail::all_section_tuples(m.sections(nb), arity, [&](const std::vector<const Section*>& t) {
          std::vector<Section> args;
          for (const Section* s : t) args.push_back(*s);
          try {
            m.apply_function(name, args);
          } catch (const NotOpen&) {
            fail(c, name + " maps sections over " + m.describe(nb) + " to a non-section");
            return false;
          }
          return true;
        });
      }
    }
  }
  {
    auto& c = clause("constants are continuous global sections");
    for (const auto& name : m.signature().constants) {
      if (!m.is_section(m.constant(name).image)) fail(c, name + " is not a section");
    }
  }

  auto moduli_of = [&]() {
    std::vector<std::pair<std::string, int>> syms(m.signature().relations.begin(), m.signature().relations.end());
    syms.insert(syms.end(), m.signature().functions.begin(), m.signature().functions.end());
    return syms;
  }();
  {
    auto& c = clause("modulus positivity");
    for (const auto& [name, arity] : moduli_of) {
      auto it = m.spec().moduli.find(name);
      if (it == m.spec().moduli.end()) {
        fail(c, "no modulus for " + name);
        continue;
      }
      const auto& mod = it->second;
      if (mod.grid.empty() || mod.grid.size() != mod.delta.size()) fail(c, "malformed modulus for " + name);
      for (std::size_t i = 0; i < std::min(mod.grid.size(), mod.delta.size()); ++i) {
        if (mod.delta[i] <= Rational(0)) fail(c, name + " has delta " + to_string(mod.delta[i]) + " at eps " + to_string(mod.grid[i]));
        if (mod.grid[i] <= Rational(0)) fail(c, name + " has nonpositive grid value");
      }
    }
  }
  {
    auto& c = clause("modulus compliance");
    for (const auto& [name, arity] : moduli_of) {
      auto it = m.spec().moduli.find(name);
      if (it == m.spec().moduli.end()) continue;
      const auto& mod = it->second;
      const bool is_rel = m.signature().has_relation(name);
      const std::size_t id = is_rel ? m.relation_id(name) : m.function_id(name);
      for (std::size_t g = 0; g < std::min(mod.grid.size(), mod.delta.size()) && c.passed; ++g) {
        for (const auto& f : fibers) {
          // All pairs of tuples within this fiber.
          std::vector<Tuple> tuples;
          Tuple t(static_cast<std::size_t>(arity));
          std::vector<std::size_t> idx(t.size(), 0);
          while (true) {
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = f[idx[i]];
            tuples.push_back(t);
            std::size_t k = t.size();
            while (k > 0 && ++idx[k - 1] == f.size()) idx[--k] = 0;
            if (k == 0) break;
          }
          for (const auto& a : tuples) {
            for (const auto& b : tuples) {
              bool close = true;
              for (std::size_t i = 0; i < a.size(); ++i) close = close && m.dist(a[i], b[i]) < mod.delta[g];
              if (!close) continue;
              const Rational gap = is_rel ? abs_diff(m.relation(id, a), m.relation(id, b))
                                          : m.dist(m.function(id, a), m.function(id, b));
              if (gap > mod.grid[g]) {
                fail(c, name + " at eps " + to_string(mod.grid[g]) + ": " + m.describe_tuple(a) + " vs " +
                            m.describe_tuple(b));
              }
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace msf
