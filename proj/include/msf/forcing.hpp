#pragma once

// Fiberwise valuation, point forcing and local forcing.
//
// Every "there exists a real" in the forcing clauses is decided over a finite
// candidate set: the values a subformula can take anywhere in the sheaf, the
// threshold itself, 0, 1 and the midpoints between neighbours.  Every
// "there exists an open set / covering" is decided on minimal neighbourhoods.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msf/errors.hpp"
#include "msf/logic.hpp"
#include "msf/rational.hpp"
#include "msf/sheaf.hpp"

namespace msf {

using Environment = std::map<std::string, Section>;

struct ForcingWitness {
  std::string clause;
  std::optional<PointSet> open;
  std::vector<std::pair<PointSet, std::optional<Section>>> covering;
  std::optional<Section> section;
  std::optional<Rational> r;
  std::optional<Rational> delta;
  std::optional<Rational> eps_prime;
};

struct ForcingVerdict {
  bool holds = false;
  std::optional<ForcingWitness> witness;
};

/// Sorted candidate thresholds: `values` plus 0, 1 and midpoints of
/// consecutive members.
inline std::vector<Rational> refine(std::vector<Rational> values) {
  values.push_back(Rational(0));
  values.push_back(Rational(1));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<Rational> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back((values[i - 1] + values[i]) / 2);
    out.push_back(values[i]);
  }
  return out;
}

namespace detail {

class Forcer {
 public:
  Forcer(const MetricSheaf& m, const Environment& env) : m_(m) {
    for (const auto& [name, s] : env) {
      owned_.push_back(s);
    }
    std::size_t i = 0;
    for (const auto& [name, s] : env) bindings_.emplace_back(name, &owned_[i++]);
  }

  const MetricSheaf& sheaf() const { return m_; }

  // --- valuation in a single fiber ---

  Rational fiber_value(const Formula& f, PointId x) {
    std::vector<std::pair<std::string, ElementId>> assign;
    for (const auto& [name, s] : bindings_) {
      if (s->domain.contains(x)) assign.emplace_back(name, m_.value(*s, x));
    }
    return fiber_eval(f, x, assign);
  }

  // --- point forcing, strict comparisons only ---

  bool point(const Formula& f, Cmp cmp, const Rational& t, PointId x) {
    const bool lt = cmp == Cmp::Less;
    if (lt && t <= Rational(0)) return false;
    if (lt && t > Rational(1)) return true;
    if (!lt && t >= Rational(1)) return false;
    if (!lt && t < Rational(0)) return true;
    switch (f.kind()) {
      case Connective::Zero: return lt ? Rational(0) < t : Rational(0) > t;
      case Connective::One: return lt ? Rational(1) < t : Rational(1) > t;
      case Connective::Dist:
      case Connective::Rel: {
        const Rational v = atom_at(f, x);
        return lt ? v < t : v > t;
      }
      case Connective::Half: return point(f.body(), cmp, t * 2, x);
      case Connective::Max:
        return lt ? point(f.left(), cmp, t, x) && point(f.right(), cmp, t, x)
                  : point(f.left(), cmp, t, x) || point(f.right(), cmp, t, x);
      case Connective::Min:
        return lt ? point(f.left(), cmp, t, x) || point(f.right(), cmp, t, x)
                  : point(f.left(), cmp, t, x) && point(f.right(), cmp, t, x);
      case Connective::TruncSub: {
        const Formula a = f.left();
        const Formula b = f.right();
        if (a.kind() == Connective::One) return point(b, lt ? Cmp::Greater : Cmp::Less, truncated_sub(1, t), x);
        if (!lt) return point_gap(a, b, Cmp::Greater, t, x).has_value();
        return point_trunc_lt(a, b, t, x).has_value();
      }
      case Connective::Inf:
        return lt ? point_exists(f, cmp, t, x).has_value() : point_forall(f, cmp, t, x).has_value();
      case Connective::Sup:
        return lt ? point_forall(f, cmp, t, x).has_value() : point_exists(f, cmp, t, x).has_value();
    }
    return false;
  }

  // ⊩ₓ a ⋈ b + c, decided as ∃r with a ⋈ r and b ⋈' r − c.  Returns r.
  std::optional<Rational> point_gap(const Formula& a, const Formula& b, Cmp cmp, const Rational& c, PointId x) {
    const Cmp dual = cmp == Cmp::Less ? Cmp::Greater : Cmp::Less;
    for (const Rational& r : gap_candidates(a, b, c)) {
      if (point(a, cmp, r, x) && point(b, dual, r - c, x)) return r;
    }
    return std::nullopt;
  }

  // Cases of a ∸ b < t at x; returns 1, 2 or 3 for the first case that holds.
  std::optional<int> point_trunc_lt(const Formula& a, const Formula& b, const Rational& t, PointId x) {
    const bool below = point_gap(a, b, Cmp::Less, 0, x).has_value();
    if (below) return 1;
    const bool above = point_gap(a, b, Cmp::Greater, 0, x).has_value();
    if (!above) return 2;
    if (point_gap(a, b, Cmp::Less, t, x)) return 3;
    return std::nullopt;
  }

  // inf < t and sup > t: some section through x.
  std::optional<Section> point_exists(const Formula& q, Cmp cmp, const Rational& t, PointId x) {
    const PointSet nb = m_.base().minimal_nbhd(x);
    for (const Section& mu : m_.sections(nb)) {
      Bind bind(*this, q.name(), &mu);
      if (point(q.body(), cmp, t, x)) return mu;
    }
    return std::nullopt;
  }

  // inf > t and sup < t: a margin δ valid at every y near x for every section
  // through y.  Returns δ.
  std::optional<Rational> point_forall(const Formula& q, Cmp cmp, const Rational& t, PointId x) {
    const bool lt = cmp == Cmp::Less;
    const PointSet nb = m_.base().minimal_nbhd(x);
    auto cands = refine_with(q.body(), t);
    if (lt) std::reverse(cands.begin(), cands.end());
    for (const Rational& v : cands) {
      if (lt ? v >= t : v <= t) continue;
      bool all = true;
      for (PointId y : nb) {
        for (const Section& mu : m_.sections(m_.base().minimal_nbhd(y))) {
          Bind bind(*this, q.name(), &mu);
          if (!point(q.body(), cmp, v, y)) {
            all = false;
            break;
          }
        }
        if (!all) break;
      }
      if (all) return lt ? t - v : v - t;
    }
    return std::nullopt;
  }

  // --- local forcing ---

  bool local(const Formula& f, Cmp cmp, const Rational& t, PointSet u) {
    if (u.empty()) throw EmptyOpen();
    const bool lt = cmp == Cmp::Less;
    if (lt && t <= Rational(0)) return false;
    if (lt && t > Rational(1)) return true;
    if (!lt && t >= Rational(1)) return false;
    if (!lt && t < Rational(0)) return true;
    switch (f.kind()) {
      case Connective::Zero: return lt ? Rational(0) < t : Rational(0) > t;
      case Connective::One: return lt ? Rational(1) < t : Rational(1) > t;
      case Connective::Dist:
      case Connective::Rel: {
        for (PointId y : u) {
          const Rational v = atom_at(f, y);
          if (lt ? !(v < t) : !(v > t)) return false;
        }
        return true;
      }
      case Connective::Half: return local(f.body(), cmp, t * 2, u);
      case Connective::Max:
        return lt ? local(f.left(), cmp, t, u) && local(f.right(), cmp, t, u)
                  : local_split(f.left(), f.right(), cmp, t, u).has_value();
      case Connective::Min:
        return lt ? local_split(f.left(), f.right(), cmp, t, u).has_value()
                  : local(f.left(), cmp, t, u) && local(f.right(), cmp, t, u);
      case Connective::TruncSub: {
        const Formula a = f.left();
        const Formula b = f.right();
        if (a.kind() == Connective::One) return local(b, lt ? Cmp::Greater : Cmp::Less, truncated_sub(1, t), u);
        if (!lt) return local_gap(a, b, Cmp::Greater, t, u);
        for (PointId x : u) {
          if (!local_trunc_lt_at(a, b, t, x)) return false;
        }
        return true;
      }
      case Connective::Inf:
        return lt ? local_cover(f, cmp, t, u).has_value() : local_uniform(f, cmp, t, u).has_value();
      case Connective::Sup:
        return lt ? local_uniform(f, cmp, t, u).has_value() : local_cover(f, cmp, t, u).has_value();
    }
    return false;
  }

  // max > t and min < t: opens V ∪ W = U with the left side on V and the
  // right side on W.  Forcing only weakens on smaller opens, so W can be the
  // smallest open containing U \ V.
  std::optional<std::pair<PointSet, PointSet>> local_split(const Formula& a, const Formula& b, Cmp cmp,
                                                           const Rational& t, PointSet u) {
    if (local(a, cmp, t, u)) return std::make_pair(u, PointSet{});
    if (local(b, cmp, t, u)) return std::make_pair(PointSet{}, u);
    for (PointSet v : m_.base().opens_within(u)) {
      if (v.empty() || v == u) continue;
      const PointSet w = m_.base().open_hull(u - v);
      if (w == u) continue;
      if (local(a, cmp, t, v) && local(b, cmp, t, w)) return std::make_pair(v, w);
    }
    return std::nullopt;
  }

  // ⊩_U a ⋈ b + c: around every point some r separates the two sides.
  bool local_gap(const Formula& a, const Formula& b, Cmp cmp, const Rational& c, PointSet u) {
    for (PointId x : u) {
      if (!local_gap_at(a, b, cmp, c, x)) return false;
    }
    return true;
  }

  std::optional<Rational> local_gap_at(const Formula& a, const Formula& b, Cmp cmp, const Rational& c, PointId x) {
    const Cmp dual = cmp == Cmp::Less ? Cmp::Greater : Cmp::Less;
    const PointSet nb = m_.base().minimal_nbhd(x);
    for (const Rational& r : gap_candidates(a, b, c)) {
      if (local(a, cmp, r, nb) && local(b, dual, r - c, nb)) return r;
    }
    return std::nullopt;
  }

  // Cases of a ∸ b < t on the minimal neighbourhood of x.  Case (ii) asks that
  // neither comparison is forced anywhere inside it.
  std::optional<int> local_trunc_lt_at(const Formula& a, const Formula& b, const Rational& t, PointId x) {
    const PointSet nb = m_.base().minimal_nbhd(x);
    if (local_gap(a, b, Cmp::Less, 0, nb)) return 1;
    bool undecided = true;
    for (PointId y : nb) {
      if (local_gap_at(a, b, Cmp::Less, 0, y) || local_gap_at(a, b, Cmp::Greater, 0, y)) {
        undecided = false;
        break;
      }
    }
    if (undecided) return 2;
    if (local_gap(a, b, Cmp::Greater, 0, nb) && local_gap(a, b, Cmp::Less, t, nb)) return 3;
    return std::nullopt;
  }

  // inf < t and sup > t: a covering by minimal neighbourhoods, each with its
  // own section.
  std::optional<std::vector<std::pair<PointSet, Section>>> local_cover(const Formula& q, Cmp cmp, const Rational& t,
                                                                       PointSet u) {
    std::vector<std::pair<PointSet, Section>> cover;
    for (PointId x : u) {
      const PointSet nb = m_.base().minimal_nbhd(x);
      bool found = false;
      for (const Section& mu : m_.sections(nb)) {
        Bind bind(*this, q.name(), &mu);
        if (local(q.body(), cmp, t, nb)) {
          cover.emplace_back(nb, mu);
          found = true;
          break;
        }
      }
      if (!found) return std::nullopt;
    }
    return cover;
  }

  // inf > t and sup < t: some ε′ beyond t forced on every minimal
  // neighbourhood for every section over it.  Returns ε′.
  std::optional<Rational> local_uniform(const Formula& q, Cmp cmp, const Rational& t, PointSet u) {
    const bool lt = cmp == Cmp::Less;
    auto cands = refine_with(q.body(), t);
    if (lt) std::reverse(cands.begin(), cands.end());
    for (const Rational& e : cands) {
      if (lt ? (e >= t || e <= Rational(0)) : e <= t) continue;
      bool all = true;
      for (PointId x : u) {
        const PointSet nb = m_.base().minimal_nbhd(x);
        for (const Section& mu : m_.sections(nb)) {
          Bind bind(*this, q.name(), &mu);
          if (!local(q.body(), cmp, e, nb)) {
            all = false;
            break;
          }
        }
        if (!all) break;
      }
      if (all) return e;
    }
    return std::nullopt;
  }

  // --- helpers ---

  // Scoped binding of a quantified variable.
  struct Bind {
    Bind(Forcer& f, const std::string& name, const Section* s) : f_(f) { f_.bindings_.emplace_back(name, s); }
    ~Bind() { f_.bindings_.pop_back(); }
    Bind(const Bind&) = delete;
    Bind& operator=(const Bind&) = delete;
    Forcer& f_;
  };

  const Section& lookup(const std::string& name) const {
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
      if (it->first == name) return *it->second;
    }
    throw UnboundVariable(name);
  }

  ElementId term_at(const Term& t, PointId y) const {
    switch (t.kind) {
      case Term::Kind::Var: {
        const Section& s = lookup(t.name);
        if (!s.domain.contains(y)) throw Error("section for '" + t.name + "' is undefined at " + m_.point_name(y));
        return m_.value(s, y);
      }
      case Term::Kind::Const: return m_.value(m_.constant(t.name), y);
      case Term::Kind::Func: {
        Tuple args;
        for (const auto& a : t.args) args.push_back(term_at(a, y));
        return m_.function(m_.function_id(t.name), args);
      }
    }
    throw Error("bad term");
  }

  Rational atom_at(const Formula& f, PointId y) const {
    const auto& ts = f.terms();
    if (f.kind() == Connective::Dist) return m_.dist(term_at(ts[0], y), term_at(ts[1], y));
    Tuple args;
    for (const auto& a : ts) args.push_back(term_at(a, y));
    return m_.relation(m_.relation_id(f.name()), args);
  }

  // Values a formula can take anywhere in the sheaf.
  const std::vector<Rational>& critical(const Formula& f) {
    if (auto it = critical_.find(f.node()); it != critical_.end()) return it->second;
    std::set<Rational> out;
    switch (f.kind()) {
      case Connective::Zero: out = {Rational(0)}; break;
      case Connective::One: out = {Rational(1)}; break;
      case Connective::Dist:
        for (std::uint32_t a = 0; a < m_.num_elements(); ++a) {
          for (ElementId b : m_.fiber(m_.proj(ElementId(a)))) out.insert(m_.dist(ElementId(a), b));
        }
        break;
      case Connective::Rel: {
        const std::size_t id = m_.relation_id(f.name());
        m_.for_each_fiber_tuple(m_.relation_arity(id), [&](const Tuple& t) { out.insert(m_.relation(id, t)); });
        break;
      }
      case Connective::Half:
        for (const auto& v : critical(f.body())) out.insert(v / 2);
        break;
      case Connective::TruncSub: {
        const auto ls = critical(f.left());
        const auto& rs = critical(f.right());
        for (const auto& a : ls) {
          for (const auto& b : rs) out.insert(truncated_sub(a, b));
        }
        break;
      }
      case Connective::Max:
      case Connective::Min: {
        const auto ls = critical(f.left());
        out.insert(ls.begin(), ls.end());
        const auto& rs = critical(f.right());
        out.insert(rs.begin(), rs.end());
        break;
      }
      case Connective::Inf:
      case Connective::Sup: {
        const auto& bs = critical(f.body());
        out.insert(bs.begin(), bs.end());
        break;
      }
    }
    return critical_.emplace(f.node(), std::vector<Rational>(out.begin(), out.end())).first->second;
  }

  std::vector<Rational> refine_with(const Formula& f, const Rational& t) {
    std::vector<Rational> vals = critical(f);
    vals.push_back(t);
    return refine(std::move(vals));
  }

  std::vector<Rational> gap_candidates(const Formula& a, const Formula& b, const Rational& c) {
    std::vector<Rational> vals = critical(a);
    for (const auto& v : critical(b)) vals.push_back(v + c);
    return refine(std::move(vals));
  }

 private:
  Rational fiber_eval(const Formula& f, PointId x, std::vector<std::pair<std::string, ElementId>>& assign) {
    auto elem = [&](auto&& self, const Term& t) -> ElementId {
      switch (t.kind) {
        case Term::Kind::Var:
          for (auto it = assign.rbegin(); it != assign.rend(); ++it) {
            if (it->first == t.name) return it->second;
          }
          throw UnboundVariable(t.name);
        case Term::Kind::Const: return m_.value(m_.constant(t.name), x);
        case Term::Kind::Func: {
          Tuple args;
          for (const auto& a : t.args) args.push_back(self(self, a));
          return m_.function(m_.function_id(t.name), args);
        }
      }
      throw Error("bad term");
    };
    switch (f.kind()) {
      case Connective::Zero: return 0;
      case Connective::One: return 1;
      case Connective::Dist: return m_.dist(elem(elem, f.terms()[0]), elem(elem, f.terms()[1]));
      case Connective::Rel: {
        Tuple args;
        for (const auto& a : f.terms()) args.push_back(elem(elem, a));
        return m_.relation(m_.relation_id(f.name()), args);
      }
      case Connective::Half: return fiber_eval(f.body(), x, assign) / 2;
      case Connective::TruncSub: return truncated_sub(fiber_eval(f.left(), x, assign), fiber_eval(f.right(), x, assign));
      case Connective::Max: return std::max(fiber_eval(f.left(), x, assign), fiber_eval(f.right(), x, assign));
      case Connective::Min: return std::min(fiber_eval(f.left(), x, assign), fiber_eval(f.right(), x, assign));
      case Connective::Inf:
      case Connective::Sup: {
        std::optional<Rational> best;
        for (ElementId e : m_.fiber(x)) {
          assign.emplace_back(f.name(), e);
          const Rational v = fiber_eval(f.body(), x, assign);
          assign.pop_back();
          if (!best || (f.kind() == Connective::Inf ? v < *best : v > *best)) best = v;
        }
        return *best;
      }
    }
    return 0;
  }

  const MetricSheaf& m_;
  std::vector<Section> owned_;
  std::vector<std::pair<std::string, const Section*>> bindings_;
  std::unordered_map<const Formula::Node*, std::vector<Rational>> critical_;
};

inline PointSet common_domain(const MetricSheaf& m, const Formula& f, const Environment& env) {
  PointSet dom = m.base().full();
  for (const auto& v : free_vars(f)) {
    auto it = env.find(v);
    if (it == env.end()) throw UnboundVariable(v);
    dom &= it->second.domain;
  }
  return dom;
}

inline void require_strict(Cmp cmp) {
  if (cmp != Cmp::Less && cmp != Cmp::Greater) throw Error("strict comparison expected");
}

}  // namespace detail

/// Thresholds worth trying for φ: every value it takes anywhere in the
/// sheaf, 0, 1 and the midpoints between neighbours.
inline std::vector<Rational> value_lattice(const MetricSheaf& m, const Formula& f) {
  detail::Forcer fr(m, {});
  return refine(fr.critical(f));
}

/// Truth value of φ in the fiber over x, free variables read through env.
inline Rational value_at(const MetricSheaf& m, PointId x, const Formula& f, const Environment& env) {
  for (const auto& v : free_vars(f)) {
    auto it = env.find(v);
    if (it == env.end()) throw UnboundVariable(v);
    if (!it->second.domain.contains(x)) throw Error("section for '" + v + "' is undefined at " + m.point_name(x));
  }
  return detail::Forcer(m, env).fiber_value(f, x);
}

inline ForcingVerdict force_point(const MetricSheaf& m, PointId x, const Condition& c, const Environment& env = {}) {
  detail::require_strict(c.cmp);
  if (!detail::common_domain(m, c.formula, env).contains(x)) {
    throw Error("environment sections are not all defined at " + m.point_name(x));
  }
  detail::Forcer fr(m, env);
  ForcingVerdict v{fr.point(c.formula, c.cmp, c.eps, x), std::nullopt};
  if (!v.holds) return v;
  const Formula& f = c.formula;
  const bool lt = c.cmp == Cmp::Less;
  ForcingWitness w;
  if (f.is_quantifier()) {
    const bool existential = (f.kind() == Connective::Inf) == lt;
    if (existential) {
      w.clause = "section";
      w.section = fr.point_exists(f, c.cmp, c.eps, x);
    } else {
      w.clause = "margin";
      w.open = m.base().minimal_nbhd(x);
      w.delta = fr.point_forall(f, c.cmp, c.eps, x);
    }
    v.witness = w;
  } else if (f.kind() == Connective::TruncSub && f.left().kind() != Connective::One) {
    if (!lt) {
      w.clause = "gap";
      w.r = fr.point_gap(f.left(), f.right(), Cmp::Greater, c.eps, x);
    } else {
      const int which = *fr.point_trunc_lt(f.left(), f.right(), c.eps, x);
      w.clause = which == 1 ? "case (i)" : which == 2 ? "case (ii)" : "case (iii)";
      if (which == 1) w.r = fr.point_gap(f.left(), f.right(), Cmp::Less, 0, x);
      if (which == 3) w.r = fr.point_gap(f.left(), f.right(), Cmp::Less, c.eps, x);
    }
    v.witness = w;
  }
  return v;
}

/// φ ≤ ε holds iff φ > ε is not forced; φ ≥ ε iff φ < ε is not forced.
inline bool force_point_nonstrict(const MetricSheaf& m, PointId x, const Formula& f, Cmp cmp, const Rational& eps,
                                  const Environment& env = {}) {
  if (cmp == Cmp::LessEq) return !force_point(m, x, Condition{f, Cmp::Greater, eps}, env).holds;
  if (cmp == Cmp::GreaterEq) return !force_point(m, x, Condition{f, Cmp::Less, eps}, env).holds;
  throw Error("non-strict comparison expected");
}

inline bool forces_at(const MetricSheaf& m, PointId x, const Condition& c, const Environment& env = {}) {
  if (c.cmp == Cmp::LessEq || c.cmp == Cmp::GreaterEq) return force_point_nonstrict(m, x, c.formula, c.cmp, c.eps, env);
  return force_point(m, x, c, env).holds;
}

inline ForcingVerdict force_local(const MetricSheaf& m, PointSet u, const Condition& c, const Environment& env = {}) {
  detail::require_strict(c.cmp);
  if (u.empty()) throw EmptyOpen();
  if (!m.base().is_open(u)) throw NotOpen("forcing over a set that is not open");
  if (!u.subset_of(detail::common_domain(m, c.formula, env))) {
    throw Error("environment sections are not all defined on " + m.describe(u));
  }
  detail::Forcer fr(m, env);
  ForcingVerdict v{fr.local(c.formula, c.cmp, c.eps, u), std::nullopt};
  if (!v.holds) return v;
  const Formula& f = c.formula;
  const bool lt = c.cmp == Cmp::Less;
  ForcingWitness w;
  if (f.is_quantifier()) {
    const bool existential = (f.kind() == Connective::Inf) == lt;
    if (existential) {
      w.clause = "covering";
      const auto cover = fr.local_cover(f, c.cmp, c.eps, u);
      for (const auto& [nb, mu] : *cover) w.covering.emplace_back(nb, mu);
    } else {
      w.clause = "uniform";
      w.eps_prime = fr.local_uniform(f, c.cmp, c.eps, u);
      for (PointId x : u) w.covering.emplace_back(m.base().minimal_nbhd(x), std::nullopt);
    }
    v.witness = w;
  } else if ((f.kind() == Connective::Max && !lt) || (f.kind() == Connective::Min && lt)) {
    auto [a, b] = *fr.local_split(f.left(), f.right(), c.cmp, c.eps, u);
    w.clause = "split";
    w.covering = {{a, std::nullopt}, {b, std::nullopt}};
    v.witness = w;
  }
  return v;
}

/// For every x where the condition is forced, it is forced throughout the
/// minimal neighbourhood of x.
inline bool check_truth_continuity(const MetricSheaf& m, const Condition& c, const Environment& env = {}) {
  detail::require_strict(c.cmp);
  const PointSet dom = detail::common_domain(m, c.formula, env);
  detail::Forcer fr(m, env);
  for (PointId x : dom) {
    if (!fr.point(c.formula, c.cmp, c.eps, x)) continue;
    for (PointId y : m.base().minimal_nbhd(x) & dom) {
      if (!fr.point(c.formula, c.cmp, c.eps, y)) return false;
    }
  }
  return true;
}

struct MaxPrincipleWitness {
  Section section;
  PointSet domain;
  Rational eps_prime;
  /// ⊩_W φ(μ) < ε′.
  bool holds_on_domain = false;
  /// ⊩_U φ(μ) < ε′, only meaningful when W = U.
  std::optional<bool> holds_on_u;
};

/// Given ⊩_U inf_v φ < ε, finds μ on an open W dense in U with
/// ⊩_W φ(μ) < ε′ for some ε′ < ε.  Larger W and larger ε′ are tried first.
inline std::optional<MaxPrincipleWitness> max_principle_witness(const MetricSheaf& m, PointSet u, const Formula& phi,
                                                                const std::string& var, const Rational& eps,
                                                                const Environment& env = {}) {
  const Condition pre{Formula::inf(var, phi), Cmp::Less, eps};
  if (!force_local(m, u, pre, env).holds) return std::nullopt;
  detail::Forcer fr(m, env);
  auto cands = fr.refine_with(phi, eps);
  std::reverse(cands.begin(), cands.end());
  std::erase_if(cands, [&](const Rational& e) { return e >= eps || e <= Rational(0); });

  auto dense = m.base().opens_within(u);
  std::erase_if(dense, [&](PointSet w) { return w.empty() || !u.subset_of(m.base().closure(w)); });
  std::stable_sort(dense.begin(), dense.end(), [](PointSet a, PointSet b) { return a.size() > b.size(); });

  for (PointSet w : dense) {
    for (const Section& mu : m.sections(w)) {
      detail::Forcer::Bind bind(fr, var, &mu);
      for (const Rational& e : cands) {
        if (fr.local(phi, Cmp::Less, e, w)) {
          MaxPrincipleWitness out{mu, w, e, true, std::nullopt};
          if (w == u) out.holds_on_u = true;
          return out;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace msf
