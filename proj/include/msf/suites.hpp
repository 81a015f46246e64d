#pragma once

// Exhaustive property suites over a sheaf: forcing laws, the filter
// pseudometric, generic model agreement and induced continuity.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msf/errors.hpp"
#include "msf/forcing.hpp"
#include "msf/generic.hpp"
#include "msf/logic.hpp"
#include "msf/sheaf.hpp"
#include "msf/topology.hpp"

namespace msf {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> examples;
  /// Set when the suite does not apply to the sheaf.
  std::optional<std::string> skipped;

  bool ok() const { return failures == 0; }

  void check(bool good, const std::string& what) {
    ++checks;
    if (good) return;
    ++failures;
    if (examples.size() < 5) examples.push_back(what);
  }
};

struct PropertyOptions {
  int depth = 2;
  int quantifiers = 1;
  int gmt_depth = 3;
  std::vector<Rational> eps{Rational(1, 4), Rational(1, 2), Rational(3, 4)};
  /// Above this many sections the environments fall back to named sections.
  std::size_t env_limit = 64;
};

/// Bindings of the free variable "x".  Small sheaves bind x to every section
/// over every nonempty open; larger ones to the named sections.
inline std::vector<Environment> property_environments(const MetricSheaf& m, std::size_t limit = 64) {
  std::vector<Section> all;
  for (PointSet u : m.base().opens()) {
    if (u.empty()) continue;
    const auto& s = m.sections(u);
    all.insert(all.end(), s.begin(), s.end());
  }
  if (all.size() > limit) {
    all.clear();
    for (const auto& [name, image] : m.spec().named_sections) all.push_back(m.section_from_image(image));
  }
  std::vector<Environment> out;
  for (const Section& s : all) out.push_back(Environment{{"x", s}});
  return out;
}

namespace detail {

inline const std::string kVar = "x";

// Calls fn(formula, env) for each generated formula, once with the empty
// environment if x is not free and once per binding otherwise.
template <class Fn>
void for_each_instance(const std::vector<Formula>& family, const std::vector<Environment>& envs, Fn&& fn) {
  static const Environment none;
  for (const Formula& f : family) {
    if (free_vars(f).count(kVar) == 0) {
      fn(f, none);
      continue;
    }
    for (const Environment& env : envs) fn(f, env);
  }
}

inline std::string describe_instance(const MetricSheaf& m, const Formula& f, const Environment& env) {
  std::string out = print_formula(f);
  for (const auto& [v, s] : env) out += " [" + v + ":=" + m.describe(s) + "]";
  return out;
}

inline std::vector<PointSet> nonempty_opens_within(const MetricSheaf& m, PointSet dom) {
  std::vector<PointSet> out;
  for (PointSet u : m.base().opens()) {
    if (!u.empty() && u.subset_of(dom)) out.push_back(u);
  }
  return out;
}

inline Formula negate(const Formula& f) { return Formula::trunc_sub(Formula::one(), f); }

inline std::vector<Section> sections_in_filter(const MetricSheaf& m, const OpenFilter& f) {
  std::vector<Section> out;
  for (PointSet u : f.members()) {
    const auto& s = m.sections(u);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace detail

/// Point forcing of a quantifier-free condition is the exact comparison of
/// its fiber value.
inline SuiteResult suite_quantifier_free(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"quantifier-free agreement"};
  const auto envs = property_environments(m, o.env_limit);
  const auto family = enumerate_formulas(m.signature(), o.depth, 0, {detail::kVar});
  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    for (PointId x : detail::common_domain(m, f, env)) {
      const Rational v = value_at(m, x, f, env);
      for (const Rational& e : o.eps) {
        r.check(force_point(m, x, {f, Cmp::Less, e}, env).holds == (v < e),
                detail::describe_instance(m, f, env) + " < " + to_string(e) + " at " + m.point_name(x));
        r.check(force_point(m, x, {f, Cmp::Greater, e}, env).holds == (v > e),
                detail::describe_instance(m, f, env) + " > " + to_string(e) + " at " + m.point_name(x));
      }
    }
  });
  return r;
}

inline SuiteResult suite_truth_continuity(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"truth continuity"};
  const auto envs = property_environments(m, o.env_limit);
  const auto family = enumerate_formulas(m.signature(), o.depth, o.quantifiers, {detail::kVar});
  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    for (const Rational& e : o.eps) {
      for (Cmp c : {Cmp::Less, Cmp::Greater}) {
        r.check(check_truth_continuity(m, {f, c, e}, env),
                detail::describe_instance(m, f, env) + " " + to_string(c) + " " + to_string(e));
      }
    }
  });
  return r;
}

/// φ ≤ ε′ forces φ < ε and φ ≥ ε forces φ > ε′ for lattice values ε′ < ε.
inline SuiteResult suite_monotonicity(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"monotonicity"};
  const auto envs = property_environments(m, o.env_limit);
  const auto family = enumerate_formulas(m.signature(), o.depth, o.quantifiers, {detail::kVar});
  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    std::vector<Rational> lattice = value_lattice(m, f);
    std::erase_if(lattice, [](const Rational& v) { return v <= Rational(0) || v >= Rational(1); });
    const std::size_t n = lattice.size();
    for (PointId x : detail::common_domain(m, f, env)) {
      std::vector<char> lt(n), gt(n), le(n), ge(n);
      for (std::size_t i = 0; i < n; ++i) {
        lt[i] = forces_at(m, x, {f, Cmp::Less, lattice[i]}, env);
        gt[i] = forces_at(m, x, {f, Cmp::Greater, lattice[i]}, env);
        le[i] = forces_at(m, x, {f, Cmp::LessEq, lattice[i]}, env);
        ge[i] = forces_at(m, x, {f, Cmp::GreaterEq, lattice[i]}, env);
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const std::string at = " at " + m.point_name(x) + " eps' " + to_string(lattice[i]) + " eps " +
                                 to_string(lattice[j]);
          r.check(!le[i] || lt[j], detail::describe_instance(m, f, env) + " <= then <" + at);
          r.check(!ge[j] || gt[i], detail::describe_instance(m, f, env) + " >= then >" + at);
        }
      }
    }
  });
  return r;
}

/// inf/sup dualities at points and on opens, and double negation.
inline SuiteResult suite_dualities(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"dualities"};
  const auto envs = property_environments(m, o.env_limit);
  const auto family = enumerate_formulas(m.signature(), o.depth, o.quantifiers, {detail::kVar});
  const auto opens = detail::nonempty_opens_within(m, m.base().full());

  for (const Formula& phi : family) {
    const Formula inf_neg = Formula::inf(detail::kVar, detail::negate(phi));
    const Formula sup_pos = Formula::sup(detail::kVar, phi);
    const Formula inf_pos = Formula::inf(detail::kVar, phi);
    const Formula sup_neg = Formula::sup(detail::kVar, detail::negate(phi));
    for (const Rational& e : o.eps) {
      const Rational ne = truncated_sub(1, e);
      const std::string tag = print_formula(phi) + " eps " + to_string(e);
      for (std::uint32_t i = 0; i < m.num_points(); ++i) {
        const PointId x(i);
        r.check(force_point(m, x, {inf_neg, Cmp::Greater, ne}).holds == force_point(m, x, {sup_pos, Cmp::Less, e}).holds,
                "point inf/sup duality for " + tag + " at " + m.point_name(x));
        r.check(force_point(m, x, {inf_pos, Cmp::Less, e}).holds == force_point(m, x, {sup_neg, Cmp::Greater, ne}).holds,
                "point sup/inf duality for " + tag + " at " + m.point_name(x));
      }
      for (PointSet u : opens) {
        r.check(force_local(m, u, {inf_neg, Cmp::Greater, ne}).holds == force_local(m, u, {sup_pos, Cmp::Less, e}).holds,
                "local inf/sup duality for " + tag + " on " + m.describe(u));
        r.check(force_local(m, u, {inf_pos, Cmp::Less, e}).holds == force_local(m, u, {sup_neg, Cmp::Greater, ne}).holds,
                "local sup/inf duality for " + tag + " on " + m.describe(u));
      }
    }
  }

  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    const Formula dn = detail::negate(detail::negate(f));
    const PointSet dom = detail::common_domain(m, f, env);
    for (const Rational& e : o.eps) {
      for (Cmp c : {Cmp::Less, Cmp::Greater}) {
        const std::string tag = detail::describe_instance(m, f, env) + " " + to_string(c) + " " + to_string(e);
        for (PointId x : dom) {
          r.check(force_point(m, x, {dn, c, e}, env).holds == force_point(m, x, {f, c, e}, env).holds,
                  "point double negation for " + tag + " at " + m.point_name(x));
        }
        for (PointSet u : detail::nonempty_opens_within(m, dom)) {
          r.check(force_local(m, u, {dn, c, e}, env).holds == force_local(m, u, {f, c, e}, env).holds,
                  "local double negation for " + tag + " on " + m.describe(u));
        }
      }
    }
  });
  return r;
}

/// Forcing on an open set implies forcing at each of its points.
inline SuiteResult suite_bridging(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"local to pointwise"};
  const auto envs = property_environments(m, o.env_limit);
  const auto family = enumerate_formulas(m.signature(), o.depth, o.quantifiers, {detail::kVar});
  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    for (PointSet u : detail::nonempty_opens_within(m, detail::common_domain(m, f, env))) {
      for (const Rational& e : o.eps) {
        for (Cmp c : {Cmp::Less, Cmp::Greater}) {
          if (!force_local(m, u, {f, c, e}, env).holds) continue;
          for (PointId x : u) {
            r.check(force_point(m, x, {f, c, e}, env).holds, detail::describe_instance(m, f, env) + " " +
                                                                  to_string(c) + " " + to_string(e) + " on " +
                                                                  m.describe(u) + " but not at " + m.point_name(x));
          }
        }
      }
    }
  });
  return r;
}

/// Whenever inf_x φ < ε is forced on U, a witness section on a dense open
/// W ⊆ U forces φ < ε′ for some ε′ < ε.
inline SuiteResult suite_max_principle(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"maximum principle"};
  const auto family = enumerate_formulas(m.signature(), o.depth, o.quantifiers, {detail::kVar});
  const auto opens = detail::nonempty_opens_within(m, m.base().full());
  for (const Formula& phi : family) {
    const Formula q = Formula::inf(detail::kVar, phi);
    for (PointSet u : opens) {
      for (const Rational& e : o.eps) {
        if (!force_local(m, u, {q, Cmp::Less, e}).holds) continue;
        const std::string tag = print_formula(q) + " < " + to_string(e) + " on " + m.describe(u);
        auto w = max_principle_witness(m, u, phi, detail::kVar, e);
        if (!w) {
          r.check(false, "no witness for " + tag);
          continue;
        }
        const bool shape = w->section.domain == w->domain && w->domain.subset_of(u) && !w->domain.empty() &&
                           m.base().is_open(w->domain) && u.subset_of(m.base().closure(w->domain)) &&
                           w->eps_prime < e && Rational(0) < w->eps_prime;
        const bool forced =
            shape && force_local(m, w->domain, {phi, Cmp::Less, w->eps_prime}, {{detail::kVar, w->section}}).holds;
        r.check(forced, "bad witness " + m.describe(w->section) + " for " + tag);
      }
    }
  }
  return r;
}

/// ρ is a pseudometric on the sections with domain in each ultrafilter, the
/// quotient distance agrees with it, and the quotient is a metric.
inline SuiteResult suite_pseudometric(const MetricSheaf& m) {
  SuiteResult r{"pseudometric"};
  if (!is_regular_space(m.base())) {
    r.skipped = "hypothesis violated: regularity";
    return r;
  }
  // Distances by rank: inf and sup commute with an order-preserving coding.
  std::vector<Rational> values{Rational(0)};
  for (std::uint32_t a = 0; a < m.num_elements(); ++a) {
    for (ElementId b : m.fiber(m.proj(ElementId(a)))) values.push_back(m.dist(ElementId(a), b));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t ne = m.num_elements();
  std::vector<std::uint8_t> rank(ne * ne, 0);
  for (std::uint32_t a = 0; a < ne; ++a) {
    for (ElementId b : m.fiber(m.proj(ElementId(a)))) {
      rank[a * ne + b.value] = static_cast<std::uint8_t>(
          std::lower_bound(values.begin(), values.end(), m.dist(ElementId(a), b)) - values.begin());
    }
  }

  for (const OpenFilter& F : enumerate_regular_ultrafilters(m.base())) {
    const std::string fname = "at:" + m.point_name(F.atom()->front());
    const auto secs = detail::sections_in_filter(m, F);
    const std::size_t n = secs.size();
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<PointSet>> traces;
    std::vector<std::uint8_t> rho_tab(n * n);
    // val[i][x] is the element of section i over x.
    std::vector<std::vector<std::uint32_t>> val(n, std::vector<std::uint32_t>(m.num_points(), 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (PointId x : secs[i].domain) val[i][x.value] = m.value(secs[i], x).value;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        auto key = std::make_pair(secs[i].domain.bits(), secs[j].domain.bits());
        auto it = traces.find(key);
        if (it == traces.end()) it = traces.emplace(key, filter_trace(F, {secs[i].domain, secs[j].domain})).first;
        std::uint8_t best = 255;
        for (PointSet w : it->second) {
          std::uint8_t worst = 0;
          for (PointId x : w) worst = std::max(worst, rank[val[i][x.value] * ne + val[j][x.value]]);
          best = std::min(best, worst);
        }
        rho_tab[i * n + j] = best;
      }
    }
    auto at = [&](std::size_t i, std::size_t j) { return rho_tab[i * n + j]; };

    // The library's rho on a sample of pairs.
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 40); ++i) {
      for (std::size_t j = 0; j < std::min<std::size_t>(n, 40); ++j) {
        r.check(rho(m, F, secs[i], secs[j]) == values[at(i, j)],
                fname + ": rho(" + m.describe(secs[i]) + "," + m.describe(secs[j]) + ")");
      }
    }

    bool symmetric = true;
    for (std::size_t i = 0; i < n; ++i) {
      r.check(at(i, i) == 0, fname + ": rho(" + m.describe(secs[i]) + ",same) != 0");
      for (std::size_t j = i + 1; j < n; ++j) {
        if (at(i, j) != at(j, i)) {
          symmetric = false;
          r.check(false, fname + ": rho not symmetric on " + m.describe(secs[i]) + "," + m.describe(secs[j]));
        }
      }
    }
    r.check(symmetric, fname + ": symmetry");

    // Under symmetry, sections with equal rows are interchangeable in every
    // triangle, so one row per distinct pattern suffices.
    std::map<std::vector<std::uint8_t>, std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      rows.emplace(std::vector<std::uint8_t>(rho_tab.begin() + i * n, rho_tab.begin() + (i + 1) * n), i);
    }
    std::vector<std::size_t> reps;
    for (const auto& [row, i] : rows) reps.push_back(i);
    for (std::size_t a : reps) {
      for (std::size_t b : reps) {
        for (std::size_t c : reps) {
          r.check(values[at(a, c)] <= values[at(a, b)] + values[at(b, c)],
                  fname + ": triangle " + m.describe(secs[a]) + "," + m.describe(secs[b]) + "," + m.describe(secs[c]));
        }
      }
    }

    const GenericModel G(m, F);
    std::vector<std::size_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) cls[i] = G.class_of(secs[i]);
    const std::size_t k = G.size();
    std::vector<std::uint8_t> class_rank(k * k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        class_rank[a * k + b] = static_cast<std::uint8_t>(
            std::lower_bound(values.begin(), values.end(), G.dist(a, b)) - values.begin());
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (class_rank[cls[i] * k + cls[j]] != at(i, j)) {
          r.check(false, fname + ": d_F disagrees with rho on " + m.describe(secs[i]) + "," + m.describe(secs[j]));
        }
      }
    }
    r.check(true, fname + ": d_F is rho on classes");
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        r.check((G.dist(a, b) == Rational(0)) == (a == b), fname + ": d_F separation");
        r.check(G.dist(a, b) == G.dist(b, a), fname + ": d_F symmetry");
        r.check(G.dist(a, b) <= Rational(1), fname + ": d_F diameter");
        for (std::size_t c = 0; c < k; ++c) {
          r.check(G.dist(a, c) <= G.dist(a, b) + G.dist(b, c), fname + ": d_F triangle");
        }
      }
    }
    auto wd = G.check_well_defined();
    r.check(!wd, fname + ": " + wd.value_or(""));
  }
  return r;
}

struct GmtTally {
  std::size_t conditions = 0;
  std::size_t agree = 0;
  std::vector<std::string> counterexamples;
};

/// Both sides of the generic model theorem for every generated condition.
/// Formulas with x free are checked with x bound to each class
/// representative.
inline std::map<std::string, GmtTally> gmt_sweep(const MetricSheaf& m, const GenericModel& G, int depth,
                                                 int quantifiers, const std::vector<Rational>& eps) {
  std::map<std::string, GmtTally> out;
  const std::string fname = "at:" + m.point_name(G.filter().atom()->front());
  GmtTally& t = out[fname];
  std::vector<Environment> envs;
  for (const auto& c : G.universe()) envs.push_back(Environment{{detail::kVar, c.representative}});
  const auto family = enumerate_formulas(m.signature(), depth, quantifiers, {detail::kVar});
  detail::for_each_instance(family, envs, [&](const Formula& f, const Environment& env) {
    for (const Rational& e : eps) {
      const GmtReport rep = gmt_check(G, f, e, env);
      for (const GmtClause* c : {&rep.less, &rep.greater}) {
        ++t.conditions;
        if (c->agree()) {
          ++t.agree;
        } else if (t.counterexamples.size() < 5) {
          t.counterexamples.push_back(detail::describe_instance(m, f, env) + " " + to_string(c->cmp) + " " +
                                      to_string(e) + ": value " + to_string(rep.value) +
                                      (c->forced ? ", forced" : ", not forced"));
        }
      }
    }
  });
  return out;
}

inline SuiteResult suite_gmt(const MetricSheaf& m, const PropertyOptions& o = {}) {
  SuiteResult r{"generic model theorem"};
  if (!is_regular_space(m.base())) {
    r.skipped = "hypothesis violated: regularity";
    return r;
  }
  for (const OpenFilter& F : enumerate_regular_ultrafilters(m.base())) {
    const GenericModel G(m, F);
    for (const auto& [name, t] : gmt_sweep(m, G, o.gmt_depth, o.quantifiers, o.eps)) {
      r.checks += t.conditions;
      r.failures += t.conditions - t.agree;
      for (const auto& c : t.counterexamples) {
        if (r.examples.size() < 5) r.examples.push_back(name + ": " + c);
      }
    }
  }
  return r;
}

inline SuiteResult suite_induced_modulus(const MetricSheaf& m) {
  SuiteResult r{"induced modulus"};
  if (!is_regular_space(m.base())) {
    r.skipped = "hypothesis violated: regularity";
    return r;
  }
  for (const OpenFilter& F : enumerate_regular_ultrafilters(m.base())) {
    const GenericModel G(m, F);
    for (const auto& [name, arity] : m.signature().relations) {
      r.check(check_induced_modulus(G, name), "at:" + m.point_name(F.atom()->front()) + ": " + name);
    }
  }
  return r;
}

// --- cyclic flow ---

inline const char* const kFlowCondition =
    "sup s. sup e. sup m. (1 -. max(d(e,m), 1 -. d(mult(e,s), mult(m,s)))) < 1/4";

/// Every section with domain in the filter sits at distance 0 from each of
/// its global extensions.
inline SuiteResult suite_flow_extensions(const MetricSheaf& m) {
  SuiteResult r{"flow extensions"};
  if (!is_regular_space(m.base())) {
    r.skipped = "hypothesis violated: regularity";
    return r;
  }
  const Formula d = Formula::dist(Term::var("x"), Term::var("y"));
  const auto& globals = m.sections(m.base().full());
  for (const OpenFilter& F : enumerate_regular_ultrafilters(m.base())) {
    const GenericModel G(m, F);
    for (const Section& s : detail::sections_in_filter(m, F)) {
      for (const Section& mu : globals) {
        if (!s.image.subset_of(mu.image)) continue;
        const Rational v = eval_generic(G, d, {{"x", G.class_of(s)}, {"y", G.class_of(mu)}});
        r.check(v == Rational(0), "at:" + m.point_name(F.atom()->front()) + ": d([" + m.describe(s) + "],[" +
                                      m.describe(mu) + "]) = " + to_string(v));
      }
    }
  }
  return r;
}

/// The flow condition holds in every generic model and the forcing side
/// agrees.
inline SuiteResult suite_flow_condition(const MetricSheaf& m) {
  SuiteResult r{"flow condition"};
  if (!m.signature().has_function("mult")) {
    r.skipped = "signature has no mult";
    return r;
  }
  if (!is_regular_space(m.base())) {
    r.skipped = "hypothesis violated: regularity";
    return r;
  }
  const Condition c = parse_condition(kFlowCondition, m.signature());
  for (const OpenFilter& F : enumerate_regular_ultrafilters(m.base())) {
    const GenericModel G(m, F);
    const GmtReport rep = gmt_check(G, c.formula, c.eps);
    const std::string fname = "at:" + m.point_name(F.atom()->front());
    r.check(rep.less.satisfied, fname + ": generic value " + to_string(rep.value) + " is not < " + to_string(c.eps));
    r.check(rep.less.agree(), fname + ": forcing side " + (rep.less.forced ? "holds" : "fails") +
                                  " while the generic side " + (rep.less.satisfied ? "holds" : "fails"));
  }
  return r;
}

/// Every suite that applies to the sheaf, in a fixed order.
inline std::vector<SuiteResult> run_all_suites(const MetricSheaf& m, const PropertyOptions& o = {}) {
  std::vector<SuiteResult> out;
  out.push_back(suite_quantifier_free(m, o));
  out.push_back(suite_truth_continuity(m, o));
  out.push_back(suite_monotonicity(m, o));
  out.push_back(suite_dualities(m, o));
  out.push_back(suite_bridging(m, o));
  out.push_back(suite_max_principle(m, o));
  out.push_back(suite_pseudometric(m));
  out.push_back(suite_gmt(m, o));
  out.push_back(suite_induced_modulus(m));
  return out;
}

}  // namespace msf
