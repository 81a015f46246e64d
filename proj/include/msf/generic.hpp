#pragma once

// Metric generic model: sections whose domain lies in an ultrafilter of
// regular opens, identified when their filter distance is 0.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "msf/errors.hpp"
#include "msf/forcing.hpp"
#include "msf/logic.hpp"
#include "msf/rational.hpp"
#include "msf/sheaf.hpp"
#include "msf/topology.hpp"

namespace msf {

/// inf over U in the trace of F on both domains of sup over U of the fiber
/// distance.
inline Rational rho(const MetricSheaf& m, const OpenFilter& f, const Section& a, const Section& b) {
  std::optional<Rational> best;
  for (PointSet u : filter_trace(f, {a.domain, b.domain})) {
    Rational worst = 0;
    for (PointId x : u) worst = std::max(worst, m.dist(m.value(a, x), m.value(b, x)));
    if (!best || worst < *best) best = worst;
  }
  return best.value_or(Rational(0));
}

/// Distances coded by rank among the sheaf's metric values, so the filter
/// distance can be computed on small integers.
class RankedDistances {
 public:
  explicit RankedDistances(const MetricSheaf& m) : m_(m) {
    std::vector<Rational> vals{Rational(0)};
    for (std::uint32_t a = 0; a < m.num_elements(); ++a) {
      for (ElementId b : m.fiber(m.proj(ElementId(a)))) vals.push_back(m.dist(ElementId(a), b));
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    values_ = vals;
    const std::size_t ne = m.num_elements();
    rank_.assign(ne * ne, 0);
    for (std::uint32_t a = 0; a < ne; ++a) {
      for (ElementId b : m.fiber(m.proj(ElementId(a)))) {
        rank_[a * ne + b.value] = static_cast<std::uint8_t>(
            std::lower_bound(values_.begin(), values_.end(), m.dist(ElementId(a), b)) - values_.begin());
      }
    }
  }

  const std::vector<Rational>& values() const { return values_; }

  /// Rank of the filter distance between two sections whose domains are in
  /// the filter with member list `members`.
  std::uint8_t rho_rank(const std::vector<PointSet>& members, const Section& a, const Section& b) const {
    const PointSet common = a.domain & b.domain;
    const std::size_t ne = m_.num_elements();
    std::uint8_t per_point[64];
    for (PointId x : common) {
      per_point[x.value] = rank_[m_.value(a, x).value * ne + m_.value(b, x).value];
    }
    std::uint8_t best = 255;
    for (PointSet u : members) {
      const PointSet v = u & common;
      if (v.empty()) throw EmptyTrace();
      std::uint8_t worst = 0;
      for (PointId x : v) worst = std::max(worst, per_point[x.value]);
      best = std::min(best, worst);
    }
    return best;
  }

 private:
  const MetricSheaf& m_;
  std::vector<Rational> values_;
  std::vector<std::uint8_t> rank_;
};

struct SectionClass {
  Section representative;
  std::vector<Section> members;
};

class GenericModel {
 public:
  GenericModel(const MetricSheaf& m, OpenFilter f) : m_(&m), f_(std::move(f)) {
    const auto& X = m.base();
    if (!is_regular_space(X)) throw HypothesisViolated("regularity");
    for (PointSet u : f_.members()) {
      if (!is_regular_open(X, u)) throw HypothesisViolated("not-regular-opens");
    }
    if (!f_.regular_only() || !f_.is_ultra_over_regular(X)) throw HypothesisViolated("not-ultra");

    RankedDistances ranks(m);
    std::vector<Section> all;
    for (PointSet u : f_.members()) {
      const auto& s = m.sections(u);
      all.insert(all.end(), s.begin(), s.end());
    }
    std::sort(all.begin(), all.end());
    for (const Section& s : all) {
      std::size_t k = 0;
      for (; k < classes_.size(); ++k) {
        if (ranks.rho_rank(f_.members(), classes_[k].representative, s) == 0) break;
      }
      if (k == classes_.size()) classes_.push_back(SectionClass{s, {}});
      classes_[k].members.push_back(s);
      class_of_[key(s)] = k;
    }

    const std::size_t n = classes_.size();
    metric_.assign(n * n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        metric_[i * n + j] = ranks.values()[ranks.rho_rank(f_.members(), classes_[i].representative,
                                                            classes_[j].representative)];
      }
    }

    for (const auto& [name, arity] : m.signature().relations) {
      auto& table = relations_[name];
      for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        std::vector<Section> reps;
        for (auto i : t) reps.push_back(classes_[i].representative);
        table[t] = induced_relation(name, reps);
      });
    }
    for (const auto& [name, arity] : m.signature().functions) {
      auto& table = functions_[name];
      for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        std::vector<Section> reps;
        for (auto i : t) reps.push_back(classes_[i].representative);
        table[t] = class_of(induced_function(name, reps));
      });
    }
    for (const auto& c : m.signature().constants) constants_[c] = class_of(m.constant(c));
  }

  const MetricSheaf& sheaf() const { return *m_; }
  const OpenFilter& filter() const { return f_; }
  const std::vector<SectionClass>& universe() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  const Rational& dist(std::size_t a, std::size_t b) const { return metric_[a * classes_.size() + b]; }
  const Rational& relation(const std::string& r, const std::vector<std::size_t>& args) const {
    return relations_.at(r).at(args);
  }
  std::size_t function(const std::string& f, const std::vector<std::size_t>& args) const {
    return functions_.at(f).at(args);
  }
  std::size_t constant(const std::string& c) const { return constants_.at(c); }

  /// Class index of a section whose domain is in the filter.
  std::size_t class_of(const Section& s) const {
    auto it = class_of_.find(key(s));
    if (it == class_of_.end()) throw Error("section domain is not in the filter");
    return it->second;
  }

  /// Inf-sup value over the trace of the filter on the argument domains.
  Rational induced_relation(const std::string& r, const std::vector<Section>& args) const {
    const std::size_t id = m_->relation_id(r);
    std::vector<PointSet> doms;
    for (const auto& a : args) doms.push_back(a.domain);
    std::optional<Rational> best;
    for (PointSet u : filter_trace(f_, doms)) {
      Rational worst = 0;
      for (PointId x : u) {
        Tuple t;
        for (const auto& a : args) t.push_back(m_->value(a, x));
        worst = std::max(worst, m_->relation(id, t));
      }
      if (!best || worst < *best) best = worst;
    }
    return *best;
  }

  /// f applied pointwise on the common domain of the arguments.
  Section induced_function(const std::string& f, const std::vector<Section>& args) const {
    PointSet common = m_->base().full();
    for (const auto& a : args) common &= a.domain;
    std::vector<Section> restricted;
    for (const auto& a : args) restricted.push_back(m_->restrict(a, common));
    return m_->apply_function(f, restricted);
  }

  /// Representative independence of d, of every relation and of every
  /// function, replacing one argument at a time.  Returns the first failure.
  std::optional<std::string> check_well_defined() const {
    RankedDistances ranks(*m_);
    const std::size_t n = classes_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (const Section& s : classes_[i].members) {
        for (std::size_t j = 0; j < n; ++j) {
          if (ranks.values()[ranks.rho_rank(f_.members(), s, classes_[j].representative)] != dist(i, j)) {
            return "metric depends on the representative " + m_->describe(s);
          }
        }
      }
    }
    for (const auto& [name, arity] : m_->signature().relations) {
      std::optional<std::string> bad;
      for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        for (std::size_t pos = 0; pos < t.size() && !bad; ++pos) {
          std::vector<Section> args;
          for (auto i : t) args.push_back(classes_[i].representative);
          for (const Section& alt : classes_[t[pos]].members) {
            args[pos] = alt;
            if (induced_relation(name, args) != relation(name, t)) {
              bad = name + " depends on the representative " + m_->describe(alt);
              break;
            }
          }
        }
      });
      if (bad) return bad;
    }
    for (const auto& [name, arity] : m_->signature().functions) {
      std::optional<std::string> bad;
      for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) {
        for (std::size_t pos = 0; pos < t.size() && !bad; ++pos) {
          std::vector<Section> args;
          for (auto i : t) args.push_back(classes_[i].representative);
          for (const Section& alt : classes_[t[pos]].members) {
            args[pos] = alt;
            if (class_of(induced_function(name, args)) != function(name, t)) {
              bad = name + " depends on the representative " + m_->describe(alt);
              break;
            }
          }
        }
      });
      if (bad) return bad;
    }
    return std::nullopt;
  }

  /// Calls fn on every tuple of class indices of the given arity.
  template <class Fn>
  void for_each_class_tuple(int arity, Fn&& fn) const {
    std::vector<std::size_t> t(static_cast<std::size_t>(arity), 0);
    if (classes_.empty()) return;
    while (true) {
      fn(static_cast<const std::vector<std::size_t>&>(t));
      std::size_t k = t.size();
      while (k > 0 && ++t[k - 1] == classes_.size()) t[--k] = 0;
      if (k == 0) return;
    }
  }

 private:
  // A section is determined by its image.
  static std::uint64_t key(const Section& s) { return s.image.bits(); }

  const MetricSheaf* m_;
  OpenFilter f_;
  std::vector<SectionClass> classes_;
  std::unordered_map<std::uint64_t, std::size_t> class_of_;
  std::vector<Rational> metric_;
  std::map<std::string, std::map<std::vector<std::size_t>, Rational>> relations_;
  std::map<std::string, std::map<std::vector<std::size_t>, std::size_t>> functions_;
  std::map<std::string, std::size_t> constants_;
};

inline GenericModel build_generic(const MetricSheaf& m, const OpenFilter& f) { return GenericModel(m, f); }

using ClassAssignment = std::map<std::string, std::size_t>;

namespace detail {

inline std::size_t eval_term(const GenericModel& g, const Term& t, std::vector<std::pair<std::string, std::size_t>>& a) {
  switch (t.kind) {
    case Term::Kind::Var:
      for (auto it = a.rbegin(); it != a.rend(); ++it) {
        if (it->first == t.name) return it->second;
      }
      throw UnboundVariable(t.name);
    case Term::Kind::Const: return g.constant(t.name);
    case Term::Kind::Func: {
      std::vector<std::size_t> args;
      for (const auto& x : t.args) args.push_back(eval_term(g, x, a));
      return g.function(t.name, args);
    }
  }
  throw Error("bad term");
}

inline Rational eval(const GenericModel& g, const Formula& f, std::vector<std::pair<std::string, std::size_t>>& a) {
  switch (f.kind()) {
    case Connective::Zero: return 0;
    case Connective::One: return 1;
    case Connective::Dist: return g.dist(eval_term(g, f.terms()[0], a), eval_term(g, f.terms()[1], a));
    case Connective::Rel: {
      std::vector<std::size_t> args;
      for (const auto& t : f.terms()) args.push_back(eval_term(g, t, a));
      return g.relation(f.name(), args);
    }
    case Connective::Half: return eval(g, f.body(), a) / 2;
    case Connective::TruncSub: return truncated_sub(eval(g, f.left(), a), eval(g, f.right(), a));
    case Connective::Max: return std::max(eval(g, f.left(), a), eval(g, f.right(), a));
    case Connective::Min: return std::min(eval(g, f.left(), a), eval(g, f.right(), a));
    case Connective::Inf:
    case Connective::Sup: {
      std::optional<Rational> best;
      for (std::size_t c = 0; c < g.size(); ++c) {
        a.emplace_back(f.name(), c);
        const Rational v = eval(g, f.body(), a);
        a.pop_back();
        if (!best || (f.kind() == Connective::Inf ? v < *best : v > *best)) best = v;
      }
      return *best;
    }
  }
  return 0;
}

}  // namespace detail

inline Rational eval_generic(const GenericModel& g, const Formula& f, const ClassAssignment& assignment = {}) {
  std::vector<std::pair<std::string, std::size_t>> a(assignment.begin(), assignment.end());
  return detail::eval(g, f, a);
}

struct GmtClause {
  Cmp cmp = Cmp::Less;
  bool satisfied = false;
  bool forced = false;
  /// A filter member on which the condition is forced.
  std::optional<PointSet> witness;

  bool agree() const { return satisfied == forced; }
};

struct GmtReport {
  Rational value;
  GmtClause less;
  GmtClause greater;

  bool agree() const { return less.agree() && greater.agree(); }
};

/// Both sides of the generic model theorem for φ against ε, for < and >.
inline GmtReport gmt_check(const GenericModel& g, const Formula& f, const Rational& eps, const Environment& env = {}) {
  const MetricSheaf& m = g.sheaf();
  ClassAssignment assign;
  PointSet common = m.base().full();
  for (const auto& v : free_vars(f)) {
    auto it = env.find(v);
    if (it == env.end()) throw UnboundVariable(v);
    assign[v] = g.class_of(it->second);
    common &= it->second.domain;
  }
  GmtReport r;
  r.value = eval_generic(g, f, assign);
  for (Cmp cmp : {Cmp::Less, Cmp::Greater}) {
    GmtClause c;
    c.cmp = cmp;
    c.satisfied = cmp == Cmp::Less ? r.value < eps : r.value > eps;
    for (PointSet u : g.filter().members()) {
      const PointSet v = u & common;
      if (force_local(m, v, Condition{f, cmp, eps}, env).holds) {
        c.forced = true;
        c.witness = v;
        break;
      }
    }
    (cmp == Cmp::Less ? r.less : r.greater) = c;
  }
  return r;
}

inline GmtReport gmt_check(const MetricSheaf& m, const OpenFilter& f, const Condition& cond,
                           const Environment& env = {}) {
  return gmt_check(GenericModel(m, f), cond.formula, cond.eps, env);
}

/// Class tuples closer than the modulus delta keep the induced relation
/// within the grid value.
inline bool check_induced_modulus(const GenericModel& g, const std::string& r) {
  const MetricSheaf& m = g.sheaf();
  const int arity = m.signature().relations.at(r);
  auto it = m.spec().moduli.find(r);
  if (it == m.spec().moduli.end()) return false;
  const Modulus& mod = it->second;
  std::vector<std::vector<std::size_t>> tuples;
  g.for_each_class_tuple(arity, [&](const std::vector<std::size_t>& t) { tuples.push_back(t); });
  for (std::size_t k = 0; k < mod.grid.size(); ++k) {
    for (const auto& a : tuples) {
      for (const auto& b : tuples) {
        bool close = true;
        for (std::size_t i = 0; i < a.size() && close; ++i) close = g.dist(a[i], b[i]) < mod.delta[k];
        if (close && abs_diff(g.relation(r, a), g.relation(r, b)) > mod.grid[k]) return false;
      }
    }
  }
  return true;
}

}  // namespace msf
