#include <gtest/gtest.h>

#include "msf/document.hpp"
#include "msf/forcing.hpp"
#include "msf/suites.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace msf;
using msf::test::load_fixture;
using msf::test::points;

namespace {

const PointId A(0);
const PointId B(1);

struct Disc : ::testing::Test {
  MetricSheaf m = load_fixture("disc");
  Section sec(const std::string& s) const { return parse_section(m, s); }
  Condition cond(const std::string& text) const { return parse_condition(text, m.signature()); }
};

}  // namespace

TEST_F(Disc, ValueAt) {
  const Formula uu = parse_formula("d(s,s)", m.signature());
  EXPECT_EQ(value_at(m, A, uu, {{"s", sec("u")}}), Rational(0));
  EXPECT_EQ(value_at(m, A, parse_formula("inf s . R(s)", m.signature()), {}), Rational(0));
  EXPECT_EQ(value_at(m, B, parse_formula("R(s) -. R(t)", m.signature()), {{"s", sec("z")}, {"t", sec("w")}}),
            Rational(1, 2));
  EXPECT_THROW(value_at(m, A, uu, {}), UnboundVariable);
}

TEST_F(Disc, PointAtomic) {
  const Environment env{{"s", sec("uw")}, {"t", sec("vz")}};
  EXPECT_TRUE(force_point(m, A, cond("d(s,t) < 3/4"), env).holds);
  EXPECT_FALSE(force_point(m, A, cond("d(s,t) < 1/2"), env).holds);
  for (const char* e : {"1/8", "1/4", "1/2", "3/4", "7/8"}) {
    EXPECT_TRUE(force_point(m, A, cond(std::string("d(s,s) < ") + e), env).holds);
  }
}

TEST_F(Disc, PointQuantifiers) {
  EXPECT_FALSE(force_point(m, A, cond("inf s . R(s) > 1/4")).holds);
  const auto some = force_point(m, A, cond("inf s . R(s) < 1/4"));
  ASSERT_TRUE(some.holds);
  ASSERT_TRUE(some.witness && some.witness->section);
  EXPECT_EQ(m.describe(*some.witness->section), "u");
  EXPECT_FALSE(force_point(m, A, cond("sup s . R(s) < 3/4")).holds);
  const auto margin = force_point(m, B, cond("sup s . R(s) < 3/4"));
  ASSERT_TRUE(margin.holds);
  ASSERT_TRUE(margin.witness && margin.witness->delta);
  EXPECT_GT(*margin.witness->delta, Rational(0));
}

TEST_F(Disc, NonStrict) {
  const Environment env{{"s", sec("u")}, {"t", sec("v")}};
  EXPECT_TRUE(force_point_nonstrict(m, A, parse_formula("d(s,s)", m.signature()), Cmp::LessEq, Rational(1, 4), env));
  EXPECT_TRUE(forces_at(m, A, cond("d(s,t) >= 1/2"), env));
  EXPECT_TRUE(forces_at(m, A, cond("R(s) <= 1/4"), env));
  EXPECT_TRUE(forces_at(m, A, cond("R(s) < 1/2"), env));
  EXPECT_THROW(force_point(m, A, cond("R(s) <= 1/4"), env), Error);
}

TEST_F(Disc, LocalExamples) {
  const auto v = force_local(m, m.base().full(), cond("sup s . R(s) > 1/4"));
  ASSERT_TRUE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->clause, "covering");
  ASSERT_EQ(v.witness->covering.size(), 2u);
  EXPECT_EQ(v.witness->covering[0].first, points({0}));
  EXPECT_EQ(m.describe(*v.witness->covering[0].second), "v");
  EXPECT_EQ(v.witness->covering[1].first, points({1}));
  EXPECT_EQ(m.describe(*v.witness->covering[1].second), "z");

  const Environment env{{"s", sec("u")}, {"t", sec("v")}};
  EXPECT_TRUE(force_local(m, points({0}), cond("d(s,t) < 3/4"), env).holds);
  EXPECT_FALSE(force_local(m, points({0}), cond("d(s,t) < 1/2"), env).holds);
}

TEST_F(Disc, LocalErrors) {
  EXPECT_THROW(force_local(m, PointSet{}, cond("R(c) < 1/2")), EmptyOpen);
  EXPECT_THROW(force_local(m, points({0}), cond("R(s) < 1/2"), {{"s", sec("w")}}), Error);
  EXPECT_THROW(force_local(m, points({0}), cond("R(s) < 1/2")), UnboundVariable);
  const auto ind = load_fixture("indisc");
  EXPECT_THROW(force_local(ind, points({0}), parse_condition("R(c) < 1/2", ind.signature())), NotOpen);
}

TEST_F(Disc, DoubleNegation) {
  for (const char* s : {"uw", "uz", "vw", "vz"}) {
    const Environment env{{"s", sec(s)}};
    for (PointSet u : {points({0}), points({1}), points({0, 1})}) {
      for (const char* e : {"1/4", "1/2", "3/4"}) {
        const auto dn = cond(std::string("1 -. (1 -. R(s)) < ") + e);
        const auto plain = cond(std::string("R(s) < ") + e);
        EXPECT_EQ(force_local(m, u, dn, env).holds, force_local(m, u, plain, env).holds);
      }
    }
  }
}

TEST(Forcing, TruthContinuityExamples) {
  const auto ind = load_fixture("indisc");
  const Environment env{{"s", parse_section(ind, "uw")}, {"t", parse_section(ind, "vz")}};
  EXPECT_TRUE(check_truth_continuity(ind, parse_condition("d(s,t) < 3/4", ind.signature()), env));
  const auto disc = load_fixture("disc");
  EXPECT_TRUE(check_truth_continuity(disc, parse_condition("R(s) > 1/4", disc.signature()),
                                     {{"s", parse_section(disc, "v")}}));
}

TEST_F(Disc, MaxPrincipleExample) {
  const Formula phi = parse_formula("R(s)", m.signature());
  const auto w = max_principle_witness(m, m.base().full(), phi, "s", Rational(1, 4));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->section, sec("uw"));
  EXPECT_EQ(w->domain, m.base().full());
  EXPECT_EQ(w->eps_prime, Rational(1, 8));
  EXPECT_TRUE(w->holds_on_domain);
  EXPECT_EQ(w->holds_on_u, std::optional<bool>(true));
}

TEST_F(Disc, MaxPrincipleSinglePointAndAbsent) {
  const Formula phi = parse_formula("R(s)", m.signature());
  const auto w = max_principle_witness(m, points({1}), phi, "s", Rational(1, 4));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->domain, points({1}));
  EXPECT_FALSE(max_principle_witness(m, m.base().full(), Formula::one(), "s", Rational(1, 4)));
}

TEST(Forcing, ValueLatticeShape) {
  const auto m = load_fixture("disc");
  const auto v = value_lattice(m, parse_formula("R(c)", m.signature()));
  EXPECT_EQ(v.front(), Rational(0));
  EXPECT_EQ(v.back(), Rational(1));
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
  EXPECT_NE(std::find(v.begin(), v.end(), Rational(1, 4)), v.end());
  EXPECT_NE(std::find(v.begin(), v.end(), Rational(3, 4)), v.end());
}

// The valuation agrees with the brute-force oracle on every fixture.
TEST(Forcing, ValueAtMatchesOracle) {
  for (const auto& name : test::all_fixtures()) {
    const auto m = load_fixture(name);
    const auto envs = property_environments(m);
    for (const auto& f : enumerate_formulas(m.signature(), 2, 1, {"x"})) {
      for (const auto& env : envs) {
        const Section& s = env.at("x");
        for (PointId x : s.domain) {
          EXPECT_EQ(value_at(m, x, f, env), oracle::value(m, f, x, {{"x", m.value(s, x)}})) << print_formula(f);
        }
      }
    }
  }
}

TEST(Forcing, QuantifierFreeAgreement) {
  for (const auto& name : test::all_fixtures()) {
    const auto r = suite_quantifier_free(load_fixture(name));
    EXPECT_TRUE(r.ok()) << name << ": " << (r.examples.empty() ? "" : r.examples.front());
    EXPECT_GT(r.checks, 0u);
  }
}

TEST(Forcing, LocalImpliesPointwise) {
  for (const auto& name : test::all_fixtures()) {
    const auto r = suite_bridging(load_fixture(name));
    EXPECT_TRUE(r.ok()) << name << ": " << (r.examples.empty() ? "" : r.examples.front());
  }
}
